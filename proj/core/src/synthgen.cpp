#include "spkleak/synthgen.hpp"

#include <cstdio>
#include <fstream>

#include "spkleak/errors.hpp"
#include "spkleak/rng.hpp"

namespace spkleak {

void validate(const SynthConfig& config) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ValidationError(std::string("synth config: ") + what);
  };
  require(config.n_speakers >= 1, "n_speakers must be >= 1");
  require(config.segments_per_speaker >= 1, "segments_per_speaker must be >= 1");
  require(config.dim >= 1, "dim must be >= 1");
  require(config.sigma_identity >= 0.0, "sigma_identity must be >= 0");
  require(config.delta_label >= 0.0, "delta_label must be >= 0");
  require(config.sigma_noise >= 0.0, "sigma_noise must be >= 0");
  require(config.prevalence > 0.0 && config.prevalence < 1.0,
          "prevalence must lie strictly between 0 and 1");
  require(config.n_views >= 1, "n_views must be >= 1");
  require(config.frames_per_segment >= 1, "frames_per_segment must be >= 1");
}

namespace {

std::string padded(const char* prefix, std::size_t index, int width) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%s%0*zu", prefix, width, index);
  return buf;
}

int id_width(std::size_t count) {
  int width = 1;
  for (std::size_t v = count > 0 ? count - 1 : 0; v >= 10; v /= 10) ++width;
  return width < 3 ? 3 : width;
}

}  // namespace

SynthCorpus generate(const SynthConfig& config) {
  validate(config);

  SynthCorpus corpus;
  corpus.config = config;

  const int spk_width = id_width(config.n_speakers);
  const int seg_width = id_width(config.segments_per_speaker);

  std::vector<std::string> view_names;
  for (std::size_t v = 0; v < config.n_views; ++v) {
    view_names.push_back("view" + std::to_string(v));
  }
  std::vector<FeatureView> views;
  for (const std::string& name : view_names) {
    views.emplace_back(name, config.dim);
  }

  SplitMix64 rng(derive_seed(config.seed, "synth"));
  std::vector<Segment> segments;

  for (std::size_t s = 0; s < config.n_speakers; ++s) {
    SpeakerTruth truth;
    truth.speaker_id = padded("spk", s, spk_width);
    truth.label = rng.next_unit() < config.prevalence ? Diagnosis::kDepressed
                                                      : Diagnosis::kNotDepressed;
    truth.centroid.resize(config.dim);
    for (double& c : truth.centroid) {
      c = config.sigma_identity * rng.next_gaussian();
    }
    const double label_shift =
        truth.label == Diagnosis::kDepressed ? config.delta_label : 0.0;

    for (std::size_t g = 0; g < config.segments_per_speaker; ++g) {
      Segment seg;
      seg.segment_id = truth.speaker_id + padded("_s", g, seg_width);
      seg.speaker_id = truth.speaker_id;
      seg.segment_index = static_cast<int>(g);
      seg.label.value = truth.label;
      seg.feature_refs = view_names;

      for (std::size_t v = 0; v < config.n_views; ++v) {
        Matrix frames(config.frames_per_segment, config.dim);
        for (std::size_t t = 0; t < config.frames_per_segment; ++t) {
          for (std::size_t d = 0; d < config.dim; ++d) {
            double x = truth.centroid[d] + config.sigma_noise * rng.next_gaussian();
            if (d == 0) x += label_shift;
            frames.at(t, d) = x;
          }
        }
        views[v].add(seg.segment_id, std::move(frames));
      }
      segments.push_back(std::move(seg));
    }
    corpus.truth.push_back(std::move(truth));
  }

  corpus.manifest = Manifest(std::move(segments));
  for (FeatureView& view : views) {
    corpus.views.add(std::move(view));
  }
  return corpus;
}

void write_ground_truth(const SynthCorpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write ground truth file " + path.string());

  char buf[64];
  auto fmt = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };

  const SynthConfig& c = corpus.config;
  out << "[config]\n";
  out << "seed = " << c.seed << "\n";
  out << "n_speakers = " << c.n_speakers << "\n";
  out << "segments_per_speaker = " << c.segments_per_speaker << "\n";
  out << "dim = " << c.dim << "\n";
  out << "sigma_identity = " << fmt(c.sigma_identity) << "\n";
  out << "delta_label = " << fmt(c.delta_label) << "\n";
  out << "sigma_noise = " << fmt(c.sigma_noise) << "\n";
  out << "prevalence = " << fmt(c.prevalence) << "\n";
  out << "n_views = " << c.n_views << "\n";
  out << "frames_per_segment = " << c.frames_per_segment << "\n";
  out << "[speakers]\n";
  for (const SpeakerTruth& t : corpus.truth) {
    out << t.speaker_id << ',' << to_string(t.label) << ',';
    for (std::size_t d = 0; d < t.centroid.size(); ++d) {
      if (d > 0) out << ' ';
      out << fmt(t.centroid[d]);
    }
    out << "\n";
  }
  if (!out) throw IoError("failed writing ground truth file " + path.string());
}

}  // namespace spkleak

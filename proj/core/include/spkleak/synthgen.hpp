#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "spkleak/corpus.hpp"
#include "spkleak/feature_store.hpp"

namespace spkleak {

/// Generative model for identity-confounded corpora. Per speaker s a label
/// y_s ~ Bernoulli(prevalence) and a centroid mu_s ~ N(0, sigma_identity^2 I)
/// are drawn; every frame of every segment is
///   x = mu_s + y_s * delta_label * e0 + eps,   eps ~ N(0, sigma_noise^2 I)
/// with e0 the first coordinate axis. The label direction is a fixed axis so
/// closed-form Bayes rates are available. Labels are constant within a
/// speaker; sigma_identity controls how much identity leaks into features.
struct SynthConfig {
  std::uint64_t seed = 0;
  std::size_t n_speakers = 0;
  std::size_t segments_per_speaker = 0;
  std::size_t dim = 0;
  double sigma_identity = 0.0;
  double delta_label = 0.0;
  double sigma_noise = 0.0;
  double prevalence = 0.3;
  std::size_t n_views = 1;          // views share mu/y, independent noise
  std::size_t frames_per_segment = 1;

  bool operator==(const SynthConfig&) const = default;
};

void validate(const SynthConfig& config);  // throws ValidationError

struct SpeakerTruth {
  std::string speaker_id;
  Diagnosis label = Diagnosis::kNotDepressed;
  std::vector<double> centroid;
};

struct SynthCorpus {
  Manifest manifest;
  FeatureViews views;                // named "view0".."view<n-1>"
  std::vector<SpeakerTruth> truth;
  SynthConfig config;
};

/// Fully determined by config.seed; identical seeds give byte-identical
/// manifest and feature files. Draw order: per speaker in index order, the
/// label, then the centroid, then per segment / view / frame the noise.
SynthCorpus generate(const SynthConfig& config);

/// Text sidecar with the config echo and per-speaker mu_s / y_s.
void write_ground_truth(const SynthCorpus& corpus, const std::filesystem::path& path);

}  // namespace spkleak

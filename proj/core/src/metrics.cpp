#include "spkleak/metrics.hpp"

#include <fstream>
#include <set>

#include "spkleak/errors.hpp"

namespace spkleak {

ConfusionMatrix::ConfusionMatrix(std::size_t n_classes)
    : n_(n_classes), counts_(n_classes * n_classes, 0) {
  if (n_classes == 0) throw ValidationError("confusion matrix needs >= 1 class");
}

void ConfusionMatrix::add(std::size_t true_class, std::size_t predicted_class,
                          std::size_t count) {
  if (true_class >= n_ || predicted_class >= n_) {
    throw ValidationError("confusion matrix: class index out of range");
  }
  counts_[true_class * n_ + predicted_class] += count;
}

std::size_t ConfusionMatrix::count(std::size_t true_class,
                                   std::size_t predicted_class) const {
  return counts_[true_class * n_ + predicted_class];
}

std::size_t ConfusionMatrix::total() const {
  std::size_t sum = 0;
  for (std::size_t c : counts_) sum += c;
  return sum;
}

std::size_t ConfusionMatrix::trace() const {
  std::size_t sum = 0;
  for (std::size_t i = 0; i < n_; ++i) sum += counts_[i * n_ + i];
  return sum;
}

std::vector<ClassStats> per_class_stats(const ConfusionMatrix& cm) {
  std::vector<ClassStats> out(cm.n_classes());
  for (std::size_t c = 0; c < cm.n_classes(); ++c) {
    std::size_t tp = cm.count(c, c);
    std::size_t fp = 0, fn = 0;
    for (std::size_t other = 0; other < cm.n_classes(); ++other) {
      if (other == c) continue;
      fp += cm.count(other, c);
      fn += cm.count(c, other);
    }
    ClassStats& s = out[c];
    s.precision = (tp + fp) == 0 ? 0.0
                                 : static_cast<double>(tp) /
                                       static_cast<double>(tp + fp);
    s.recall = (tp + fn) == 0 ? 0.0
                              : static_cast<double>(tp) /
                                    static_cast<double>(tp + fn);
    s.f1 = (s.precision + s.recall) == 0.0
               ? 0.0
               : 2.0 * s.precision * s.recall / (s.precision + s.recall);
  }
  return out;
}

double accuracy(const ConfusionMatrix& cm) {
  const std::size_t total = cm.total();
  if (total == 0) throw ValidationError("accuracy of an empty confusion matrix");
  return static_cast<double>(cm.trace()) / static_cast<double>(total);
}

double macro_f1(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw ValidationError("macro F1 of an empty confusion matrix");
  std::vector<ClassStats> stats = per_class_stats(cm);
  double sum = 0.0;
  for (const ClassStats& s : stats) sum += s.f1;
  return sum / static_cast<double>(stats.size());
}

SpeakerIdScore speaker_id_accuracy(std::span<const std::string> predicted,
                                   std::span<const std::string> truth) {
  if (predicted.size() != truth.size()) {
    throw ValidationError("speaker_id_accuracy: " + std::to_string(predicted.size()) +
                          " predictions for " + std::to_string(truth.size()) +
                          " truths");
  }
  if (truth.empty()) {
    throw ValidationError("speaker_id_accuracy: empty prediction list");
  }
  std::set<std::string> speakers(truth.begin(), truth.end());
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (predicted[i] != kOovSpeaker && predicted[i] == truth[i]) ++correct;
  }
  SpeakerIdScore score;
  score.n_test_speakers = speakers.size();
  score.chance_level = 1.0 / static_cast<double>(speakers.size());
  score.accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());
  return score;
}

MetricsReport score_predictions(std::span<const PredictionRecord> records) {
  if (records.empty()) {
    throw ValidationError("cannot score an empty prediction list");
  }
  ConfusionMatrix cm(2);
  std::vector<std::string> pred_speakers, true_speakers;
  pred_speakers.reserve(records.size());
  true_speakers.reserve(records.size());
  for (const PredictionRecord& r : records) {
    cm.add(static_cast<std::size_t>(r.true_label),
           static_cast<std::size_t>(r.pred_label));
    pred_speakers.push_back(r.pred_speaker);
    true_speakers.push_back(r.true_speaker);
  }
  SpeakerIdScore spk = speaker_id_accuracy(pred_speakers, true_speakers);

  MetricsReport report;
  report.dep_macro_f1 = macro_f1(cm);
  report.dep_accuracy = accuracy(cm);
  report.spk_id_accuracy = spk.accuracy;
  report.chance_level = spk.chance_level;
  report.n_test_speakers = spk.n_test_speakers;
  report.per_class = per_class_stats(cm);
  return report;
}

namespace {
constexpr const char* kPredictionHeader =
    "segment_id,true_label,pred_label,true_speaker,pred_speaker";
}

void write_predictions(std::span<const PredictionRecord> records,
                       const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write predictions file " + path.string());
  out << kPredictionHeader << "\n";
  for (const PredictionRecord& r : records) {
    out << r.segment_id << ',' << to_string(r.true_label) << ','
        << to_string(r.pred_label) << ',' << r.true_speaker << ',' << r.pred_speaker
        << "\n";
  }
  if (!out) throw IoError("failed writing predictions file " + path.string());
}

std::vector<PredictionRecord> read_predictions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open predictions file " + path.string());

  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError(path.string(), 1, "empty file");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kPredictionHeader) {
    throw ParseError(path.string(), line_no, "bad header");
  }

  std::vector<PredictionRecord> records;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    PredictionRecord r;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
      if (i == line.size() || line[i] == ',') {
        fields.push_back(line.substr(start, i - start));
        start = i + 1;
      }
    }
    if (fields.size() != 5) {
      throw ParseError(path.string(), line_no, "expected 5 fields, got " +
                                                   std::to_string(fields.size()));
    }
    r.segment_id = fields[0];
    try {
      r.true_label = diagnosis_from_string(fields[1]);
      r.pred_label = diagnosis_from_string(fields[2]);
    } catch (const ParseError& e) {
      throw ParseError(path.string(), line_no, e.what());
    }
    r.true_speaker = fields[3];
    r.pred_speaker = fields[4];
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace spkleak

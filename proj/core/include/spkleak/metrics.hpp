#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spkleak/corpus.hpp"

namespace spkleak {

/// C x C counts; rows are the true class, columns the predicted class.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t n_classes);

  void add(std::size_t true_class, std::size_t predicted_class,
           std::size_t count = 1);

  std::size_t n_classes() const { return n_; }
  std::size_t count(std::size_t true_class, std::size_t predicted_class) const;
  std::size_t total() const;
  std::size_t trace() const;

 private:
  std::size_t n_;
  std::vector<std::size_t> counts_;
};

struct ClassStats {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Per-class precision/recall/F1. Zero denominators resolve to 0, so a class
/// with no true and no predicted instances contributes F1 = 0.
std::vector<ClassStats> per_class_stats(const ConfusionMatrix& cm);

double accuracy(const ConfusionMatrix& cm);  // trace/total; empty matrix is an error
double macro_f1(const ConfusionMatrix& cm);  // unweighted mean of per-class F1

/// Reserved predicted-speaker token for "no in-vocabulary prediction".
/// Always scored as incorrect.
inline constexpr std::string_view kOovSpeaker = "OOV";

struct SpeakerIdScore {
  double accuracy = 0.0;
  double chance_level = 0.0;  // 1 / n_test_speakers
  std::size_t n_test_speakers = 0;
};

/// Fraction of segments whose predicted speaker equals the true speaker.
/// Chance level is 1/N_s with N_s the number of distinct true speakers in
/// the evaluated set.
SpeakerIdScore speaker_id_accuracy(std::span<const std::string> predicted,
                                   std::span<const std::string> truth);

/// The three reported columns plus chance level.
struct MetricsReport {
  double dep_macro_f1 = 0.0;
  double dep_accuracy = 0.0;
  double spk_id_accuracy = 0.0;
  double chance_level = 0.0;
  std::size_t n_test_speakers = 0;
  std::vector<ClassStats> per_class;  // [not_depressed, depressed]
};

struct PredictionRecord {
  std::string segment_id;
  Diagnosis true_label = Diagnosis::kNotDepressed;
  Diagnosis pred_label = Diagnosis::kNotDepressed;
  std::string true_speaker;
  std::string pred_speaker;  // may be kOovSpeaker

  bool operator==(const PredictionRecord&) const = default;
};

MetricsReport score_predictions(std::span<const PredictionRecord> records);

/// Prediction record file: CSV with header
/// `segment_id,true_label,pred_label,true_speaker,pred_speaker`.
void write_predictions(std::span<const PredictionRecord> records,
                       const std::filesystem::path& path);
std::vector<PredictionRecord> read_predictions(const std::filesystem::path& path);

}  // namespace spkleak

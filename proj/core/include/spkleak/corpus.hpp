#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace spkleak {

enum class Diagnosis { kNotDepressed = 0, kDepressed = 1 };

// PHQ-8 threshold for clinical depression; inclusive.
inline constexpr int kPhq8Threshold = 10;

const char* to_string(Diagnosis d);
Diagnosis diagnosis_from_string(std::string_view s);  // throws ParseError

struct DepressionLabel {
  Diagnosis value = Diagnosis::kNotDepressed;
  std::optional<int> phq8_score;  // 0..24 when present

  bool operator==(const DepressionLabel&) const = default;

  // The label is internally consistent: when a score is present,
  // value == depressed iff score >= kPhq8Threshold.
  bool consistent() const;
};

struct UtteranceRecord {
  std::string speaker_id;
  int utterance_index = 0;  // strictly increasing within a speaker
  std::optional<double> start_time;  // seconds, informational
  std::optional<double> end_time;
};

struct Segment {
  std::string segment_id;  // unique corpus-wide
  std::string speaker_id;
  int segment_index = 0;  // ordinal within its speaker
  DepressionLabel label;  // constant across a speaker's segments
  std::vector<std::string> feature_refs;  // view names

  bool operator==(const Segment&) const = default;
};

/// The corpus abstraction: an immutable, indexed list of segments.
/// Construction rejects duplicate segment ids and canonicalizes
/// segment_index to each segment's arrival order within its speaker, which
/// makes the manifest file round-trip an identity. All other invariants are
/// reported (not thrown) by validate_manifest so audits can list everything.
class Manifest {
 public:
  Manifest() = default;
  explicit Manifest(std::vector<Segment> segments);  // throws ValidationError on dup ids

  const std::vector<Segment>& segments() const { return segments_; }
  const std::vector<std::string>& speakers() const { return speakers_; }  // sorted
  std::size_t segment_count() const { return segments_.size(); }
  std::size_t speaker_count() const { return speakers_.size(); }

  bool has_segment(const std::string& segment_id) const;
  const Segment& segment(const std::string& segment_id) const;  // throws on unknown id

  /// Segment ids of one speaker, in segment_index order.
  const std::vector<std::string>& segments_of(const std::string& speaker_id) const;

 private:
  std::vector<Segment> segments_;
  std::vector<std::string> speakers_;
  std::map<std::string, std::size_t> index_by_id_;
  std::map<std::string, std::vector<std::string>> ids_by_speaker_;
};

struct Violation {
  std::string code;     // stable identifier, e.g. "mixed_speaker_label"
  std::string message;  // names the offending ids
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

/// Concatenates consecutive utterance runs into segments, one segment per
/// `group_size` utterances, in order. A trailing run shorter than group_size
/// is discarded, so each speaker yields floor(n / group_size) segments.
/// Utterances must already be ordered by utterance_index within each speaker;
/// a non-monotone ordering is a ValidationError. Speakers without a label in
/// `labels` are a ValidationError.
std::vector<Segment> group_utterances(
    const std::map<std::string, std::vector<UtteranceRecord>>& utterances_by_speaker,
    const std::map<std::string, DepressionLabel>& labels, int group_size);

/// Reports every invariant violation: per-speaker label constancy, PHQ-8
/// threshold consistency, score range, and empty ids. Violations are data,
/// not failures; an empty report means the manifest is valid.
ValidationReport validate_manifest(const Manifest& m);

/// As above, and additionally flags segments whose feature_refs name views
/// missing from `known_views`.
ValidationReport validate_manifest(const Manifest& m,
                                   const std::set<std::string>& known_views);

/// Reads the manifest CSV (header `segment_id,speaker_id,label,phq8_score,
/// feature_refs`). Parse failures carry the line number; a manifest that
/// parses but violates invariants is rejected with the full violation list.
Manifest load_manifest(const std::filesystem::path& path);

void write_manifest(const Manifest& m, const std::filesystem::path& path);

}  // namespace spkleak

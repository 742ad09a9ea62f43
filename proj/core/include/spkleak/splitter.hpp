#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "spkleak/corpus.hpp"

namespace spkleak {

/// How each target speaker's segments are halved between the shared test set
/// and the subtarget (the half that may re-enter training).
///  - kRandomWithinSpeaker: seeded uniform shuffle, then split.
///  - kFirstHalfTemporal: the temporally first floor(n/2) segments form the
///    subtarget (they play the role of previously collected recordings) and
///    the remainder is tested on.
/// With an odd count the test half receives the extra segment.
enum class HalvingRule { kRandomWithinSpeaker, kFirstHalfTemporal };

const char* to_string(HalvingRule rule);
HalvingRule halving_rule_from_string(std::string_view s);  // throws ParseError

struct SplitConfig {
  std::uint64_t seed = 0;
  std::size_t n_target_speakers = 0;
  HalvingRule halving_rule = HalvingRule::kRandomWithinSpeaker;

  bool operator==(const SplitConfig&) const = default;
};

/// The size-matched, speaker-overlap-controlled partition.
///
/// Speakers are split into a control group and a target group. Each target
/// speaker's segments are halved into the shared test set and the subtarget.
/// Control segments are partitioned into subcontrol A and subcontrol B, with
/// |subcontrol B| = |subtarget|, so that the two training conditions have
/// identical size:
///   Set A = all control segments           (no speaker overlap with test)
///   Set B = subcontrol A + subtarget       (test speakers partially seen)
struct SplitPlan {
  std::set<std::string> control_speakers;
  std::set<std::string> target_speakers;
  std::set<std::string> test_set;
  std::set<std::string> subtarget;
  std::set<std::string> subcontrol_a;
  std::set<std::string> subcontrol_b;
  std::set<std::string> training_set_a;
  std::set<std::string> training_set_b;
  SplitConfig config;  // echo
  std::string tool_version;

  // tool_version is informational and excluded from equality.
  bool operator==(const SplitPlan& other) const;
};

/// The target-group selection step of build_split, exposed separately so a
/// seed's speaker assignment can be inspected without building a full plan:
/// a seeded Fisher-Yates shuffle of the sorted speaker ids; the first
/// n_target_speakers become the target group.
std::vector<std::string> select_target_speakers(std::vector<std::string> speakers_sorted,
                                                const SplitConfig& config);

/// Builds the split. Deterministic in (manifest, config): all randomness
/// comes from seeds derived as derive_seed(config.seed, label) with labels
/// "splitter/targets", "splitter/halve/<speaker_id>" and
/// "splitter/subcontrol". Errors (thrown before any output):
///   - n_target_speakers outside [1, speaker_count - 1]
///   - a selected target speaker with fewer than 2 segments
///   - control group smaller than the subtarget (size match impossible)
SplitPlan build_split(const Manifest& manifest, const SplitConfig& config);

struct SplitAuditReport {
  std::vector<Violation> violations;
  // |speakers(training set) ∩ speakers(test)| for each training condition.
  std::size_t overlap_speakers_a = 0;
  std::size_t overlap_speakers_b = 0;
  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

/// Verifies every SplitPlan invariant against the manifest and reports all
/// violations with offending ids; empty iff compliant. Ids in the plan that
/// do not exist in the manifest are an error, not a violation.
SplitAuditReport audit_split(const Manifest& manifest, const SplitPlan& plan);

/// |speakers(train) ∩ speakers(test)| for any externally supplied pair.
std::size_t speaker_overlap(const Manifest& manifest,
                            const std::set<std::string>& train_segments,
                            const std::set<std::string>& test_segments);

/// Split plan file: line-oriented text. A [meta] section with the config
/// echo and tool version, then sections [control_speakers], [target_speakers],
/// [test], [subtarget], [subcontrol_a], [subcontrol_b], one id per line.
/// Training sets are reconstructed on read (A = subcontrol_a + subcontrol_b,
/// B = subcontrol_a + subtarget).
void write_split(const SplitPlan& plan, const std::filesystem::path& path);
SplitPlan read_split(const std::filesystem::path& path);

}  // namespace spkleak

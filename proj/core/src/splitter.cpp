#include "spkleak/splitter.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "spkleak/errors.hpp"
#include "spkleak/rng.hpp"
#include "spkleak/version.hpp"

namespace spkleak {

namespace {

std::set<std::string> speakers_of(const Manifest& m,
                                  const std::set<std::string>& segment_ids) {
  std::set<std::string> out;
  for (const std::string& id : segment_ids) {
    out.insert(m.segment(id).speaker_id);
  }
  return out;
}

std::set<std::string> set_union(const std::set<std::string>& a,
                                const std::set<std::string>& b) {
  std::set<std::string> out = a;
  out.insert(b.begin(), b.end());
  return out;
}

std::vector<std::string> set_intersection(const std::set<std::string>& a,
                                          const std::set<std::string>& b) {
  std::vector<std::string> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return out;
}

std::string preview(const std::vector<std::string>& ids, std::size_t limit = 5) {
  std::string out;
  for (std::size_t i = 0; i < ids.size() && i < limit; ++i) {
    if (i > 0) out += ", ";
    out += ids[i];
  }
  if (ids.size() > limit) out += ", ...";
  return out;
}

}  // namespace

const char* to_string(HalvingRule rule) {
  return rule == HalvingRule::kFirstHalfTemporal ? "first_half_temporal"
                                                 : "random_within_speaker";
}

HalvingRule halving_rule_from_string(std::string_view s) {
  if (s == "random_within_speaker") return HalvingRule::kRandomWithinSpeaker;
  if (s == "first_half_temporal") return HalvingRule::kFirstHalfTemporal;
  throw ParseError("unknown halving rule '" + std::string(s) + "'");
}

bool SplitPlan::operator==(const SplitPlan& other) const {
  return control_speakers == other.control_speakers &&
         target_speakers == other.target_speakers && test_set == other.test_set &&
         subtarget == other.subtarget && subcontrol_a == other.subcontrol_a &&
         subcontrol_b == other.subcontrol_b &&
         training_set_a == other.training_set_a &&
         training_set_b == other.training_set_b && config == other.config;
}

std::vector<std::string> select_target_speakers(std::vector<std::string> speakers_sorted,
                                                const SplitConfig& config) {
  SplitMix64 rng(derive_seed(config.seed, "splitter/targets"));
  shuffle(speakers_sorted, rng);
  speakers_sorted.resize(std::min(speakers_sorted.size(), config.n_target_speakers));
  return speakers_sorted;
}

SplitPlan build_split(const Manifest& manifest, const SplitConfig& config) {
  const std::size_t n_speakers = manifest.speaker_count();
  if (config.n_target_speakers < 1) {
    throw ValidationError("n_target_speakers must be >= 1");
  }
  if (config.n_target_speakers >= n_speakers) {
    throw ValidationError("n_target_speakers (" +
                          std::to_string(config.n_target_speakers) +
                          ") must be below the speaker count (" +
                          std::to_string(n_speakers) + ")");
  }

  SplitPlan plan;
  plan.config = config;
  plan.tool_version = kVersion;

  std::vector<std::string> targets =
      select_target_speakers(manifest.speakers(), config);
  plan.target_speakers.insert(targets.begin(), targets.end());
  for (const std::string& speaker : manifest.speakers()) {
    if (plan.target_speakers.count(speaker) == 0) {
      plan.control_speakers.insert(speaker);
    }
  }

  // Validate everything before emitting any set.
  for (const std::string& speaker : plan.target_speakers) {
    if (manifest.segments_of(speaker).size() < 2) {
      throw ValidationError("target speaker '" + speaker +
                            "' has fewer than 2 segments; cannot halve");
    }
  }

  // Halve each target speaker's segments; the test half takes the extra
  // segment on odd counts so the shared test set stays maximal.
  for (const std::string& speaker : plan.target_speakers) {
    std::vector<std::string> ids = manifest.segments_of(speaker);
    const std::size_t n = ids.size();
    const std::size_t n_sub = n / 2;  // subtarget gets the floor half
    if (config.halving_rule == HalvingRule::kRandomWithinSpeaker) {
      SplitMix64 rng(derive_seed(config.seed, "splitter/halve/" + speaker));
      shuffle(ids, rng);
      plan.test_set.insert(ids.begin(), ids.begin() + (n - n_sub));
      plan.subtarget.insert(ids.begin() + (n - n_sub), ids.end());
    } else {
      // Temporal: the first half (by segment_index) trains, the rest tests.
      plan.subtarget.insert(ids.begin(), ids.begin() + n_sub);
      plan.test_set.insert(ids.begin() + n_sub, ids.end());
    }
  }

  std::vector<std::string> control_segments;
  for (const std::string& speaker : plan.control_speakers) {
    const auto& ids = manifest.segments_of(speaker);
    control_segments.insert(control_segments.end(), ids.begin(), ids.end());
  }
  std::sort(control_segments.begin(), control_segments.end());

  const std::size_t n_sub = plan.subtarget.size();
  if (control_segments.size() < n_sub) {
    throw ValidationError(
        "control group has " + std::to_string(control_segments.size()) +
        " segments but the subtarget needs " + std::to_string(n_sub) +
        "; size-matched training sets are impossible");
  }

  SplitMix64 rng(derive_seed(config.seed, "splitter/subcontrol"));
  shuffle(control_segments, rng);
  const std::size_t n_a = control_segments.size() - n_sub;
  plan.subcontrol_a.insert(control_segments.begin(), control_segments.begin() + n_a);
  plan.subcontrol_b.insert(control_segments.begin() + n_a, control_segments.end());

  plan.training_set_a.insert(control_segments.begin(), control_segments.end());
  plan.training_set_b = set_union(plan.subcontrol_a, plan.subtarget);
  return plan;
}

std::size_t speaker_overlap(const Manifest& manifest,
                            const std::set<std::string>& train_segments,
                            const std::set<std::string>& test_segments) {
  std::set<std::string> train_speakers = speakers_of(manifest, train_segments);
  std::set<std::string> test_speakers = speakers_of(manifest, test_segments);
  return set_intersection(train_speakers, test_speakers).size();
}

SplitAuditReport audit_split(const Manifest& manifest, const SplitPlan& plan) {
  // Dangling references are hard errors: the audit cannot reason about ids
  // the manifest does not know.
  for (const auto* ids :
       {&plan.test_set, &plan.subtarget, &plan.subcontrol_a, &plan.subcontrol_b,
        &plan.training_set_a, &plan.training_set_b}) {
    for (const std::string& id : *ids) {
      if (!manifest.has_segment(id)) {
        throw ValidationError("split plan references unknown segment '" + id + "'");
      }
    }
  }
  std::set<std::string> known_speakers(manifest.speakers().begin(),
                                       manifest.speakers().end());
  for (const auto* ids : {&plan.control_speakers, &plan.target_speakers}) {
    for (const std::string& speaker : *ids) {
      if (known_speakers.count(speaker) == 0) {
        throw ValidationError("split plan references unknown speaker '" + speaker +
                              "'");
      }
    }
  }

  SplitAuditReport report;
  auto add = [&report](std::string code, std::string message) {
    report.violations.push_back({std::move(code), std::move(message)});
  };

  std::vector<std::string> group_overlap =
      set_intersection(plan.control_speakers, plan.target_speakers);
  if (!group_overlap.empty()) {
    add("speaker_groups_overlap", "speakers in both control and target groups: " +
                                      preview(group_overlap));
  }

  // Segment populations implied by the speaker groups.
  std::set<std::string> target_segments;
  std::set<std::string> control_segments;
  std::vector<std::string> unassigned;
  for (const Segment& seg : manifest.segments()) {
    if (plan.target_speakers.count(seg.speaker_id) != 0) {
      target_segments.insert(seg.segment_id);
    } else if (plan.control_speakers.count(seg.speaker_id) != 0) {
      control_segments.insert(seg.segment_id);
    }
  }
  for (const std::string& speaker : manifest.speakers()) {
    if (plan.control_speakers.count(speaker) == 0 &&
        plan.target_speakers.count(speaker) == 0) {
      unassigned.push_back(speaker);
    }
  }
  if (!unassigned.empty()) {
    add("unassigned_speaker",
        "speakers assigned to neither group: " + preview(unassigned));
  }

  auto check_partition = [&](const std::set<std::string>& left,
                             const std::set<std::string>& right,
                             const std::set<std::string>& whole,
                             const std::string& left_name,
                             const std::string& right_name,
                             const std::string& whole_name) {
    std::vector<std::string> both = set_intersection(left, right);
    if (!both.empty()) {
      add(left_name + "_" + right_name + "_overlap",
          left_name + " and " + right_name + " share segments: " + preview(both));
    }
    std::set<std::string> joined = set_union(left, right);
    if (joined != whole) {
      std::vector<std::string> missing, extra;
      std::set_difference(whole.begin(), whole.end(), joined.begin(), joined.end(),
                          std::back_inserter(missing));
      std::set_difference(joined.begin(), joined.end(), whole.begin(), whole.end(),
                          std::back_inserter(extra));
      if (!missing.empty()) {
        add(whole_name + "_not_covered", left_name + " + " + right_name +
                                             " miss segments of " + whole_name +
                                             ": " + preview(missing));
      }
      if (!extra.empty()) {
        add(whole_name + "_overfull", left_name + " + " + right_name +
                                          " contain segments outside " + whole_name +
                                          ": " + preview(extra));
      }
    }
  };

  check_partition(plan.test_set, plan.subtarget, target_segments, "test", "subtarget",
                  "target_group");
  check_partition(plan.subcontrol_a, plan.subcontrol_b, control_segments,
                  "subcontrol_a", "subcontrol_b", "control_group");

  // Per-speaker halving balance.
  for (const std::string& speaker : plan.target_speakers) {
    std::size_t in_test = 0, in_sub = 0;
    for (const std::string& id : manifest.segments_of(speaker)) {
      in_test += plan.test_set.count(id);
      in_sub += plan.subtarget.count(id);
    }
    const std::size_t hi = std::max(in_test, in_sub);
    const std::size_t lo = std::min(in_test, in_sub);
    if (hi - lo > 1) {
      add("uneven_speaker_halves",
          "speaker '" + speaker + "' has " + std::to_string(in_test) +
              " test and " + std::to_string(in_sub) + " subtarget segments");
    }
  }

  if (plan.subcontrol_b.size() != plan.subtarget.size()) {
    add("subcontrol_b_size",
        "|subcontrol_b| = " + std::to_string(plan.subcontrol_b.size()) +
            " but |subtarget| = " + std::to_string(plan.subtarget.size()));
  }

  if (plan.training_set_a != control_segments) {
    add("set_a_mismatch",
        "training set A is not exactly the control-group segments");
  }
  std::set<std::string> expected_b = set_union(plan.subcontrol_a, plan.subtarget);
  if (plan.training_set_b != expected_b) {
    add("set_b_mismatch",
        "training set B is not exactly subcontrol_a + subtarget");
  }
  if (plan.training_set_a.size() != plan.training_set_b.size()) {
    add("size_match", "|set A| = " + std::to_string(plan.training_set_a.size()) +
                          " but |set B| = " +
                          std::to_string(plan.training_set_b.size()));
  }

  std::set<std::string> test_speakers = speakers_of(manifest, plan.test_set);
  std::set<std::string> a_speakers = speakers_of(manifest, plan.training_set_a);
  std::vector<std::string> leak = set_intersection(a_speakers, test_speakers);
  if (!leak.empty()) {
    add("speaker_overlap_set_a",
        "speaker overlap in Set A: " + preview(leak));
  }
  std::set<std::string> subtarget_speakers = speakers_of(manifest, plan.subtarget);
  std::vector<std::string> stray;
  std::set_difference(subtarget_speakers.begin(), subtarget_speakers.end(),
                      test_speakers.begin(), test_speakers.end(),
                      std::back_inserter(stray));
  if (!stray.empty()) {
    add("subtarget_speakers_untested",
        "subtarget speakers absent from the test set: " + preview(stray));
  }

  report.overlap_speakers_a = leak.size();
  report.overlap_speakers_b =
      speaker_overlap(manifest, plan.training_set_b, plan.test_set);
  return report;
}

std::string SplitAuditReport::to_string() const {
  std::ostringstream os;
  for (const Violation& v : violations) {
    os << v.code << ": " << v.message << "\n";
  }
  os << "speaker overlap with test: set A = " << overlap_speakers_a
     << ", set B = " << overlap_speakers_b << "\n";
  return os.str();
}

void write_split(const SplitPlan& plan, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write split plan " + path.string());
  out << "[meta]\n";
  out << "seed = " << plan.config.seed << "\n";
  out << "n_target_speakers = " << plan.config.n_target_speakers << "\n";
  out << "halving_rule = " << to_string(plan.config.halving_rule) << "\n";
  out << "tool_version = " << plan.tool_version << "\n";
  auto section = [&out](const char* name, const std::set<std::string>& ids) {
    out << "[" << name << "]\n";
    for (const std::string& id : ids) out << id << "\n";
  };
  section("control_speakers", plan.control_speakers);
  section("target_speakers", plan.target_speakers);
  section("test", plan.test_set);
  section("subtarget", plan.subtarget);
  section("subcontrol_a", plan.subcontrol_a);
  section("subcontrol_b", plan.subcontrol_b);
  if (!out) throw IoError("failed writing split plan " + path.string());
}

SplitPlan read_split(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open split plan " + path.string());

  SplitPlan plan;
  std::set<std::string>* current = nullptr;
  bool in_meta = false;
  std::set<std::string> seen_sections;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ParseError(path.string(), line_no, "unterminated section header");
      }
      std::string name = line.substr(1, line.size() - 2);
      if (!seen_sections.insert(name).second) {
        throw ParseError(path.string(), line_no, "duplicate section [" + name + "]");
      }
      in_meta = false;
      current = nullptr;
      if (name == "meta") {
        in_meta = true;
      } else if (name == "control_speakers") {
        current = &plan.control_speakers;
      } else if (name == "target_speakers") {
        current = &plan.target_speakers;
      } else if (name == "test") {
        current = &plan.test_set;
      } else if (name == "subtarget") {
        current = &plan.subtarget;
      } else if (name == "subcontrol_a") {
        current = &plan.subcontrol_a;
      } else if (name == "subcontrol_b") {
        current = &plan.subcontrol_b;
      } else {
        throw ParseError(path.string(), line_no, "unknown section [" + name + "]");
      }
      continue;
    }
    if (in_meta) {
      std::size_t eq = line.find('=');
      if (eq == std::string::npos) {
        throw ParseError(path.string(), line_no, "expected 'key = value' in [meta]");
      }
      auto trim = [](std::string s) {
        std::size_t b = s.find_first_not_of(" \t");
        std::size_t e = s.find_last_not_of(" \t");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
      };
      std::string key = trim(line.substr(0, eq));
      std::string value = trim(line.substr(eq + 1));
      if (key == "seed") {
        std::uint64_t v = 0;
        auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
        if (ec != std::errc{} || ptr != value.data() + value.size()) {
          throw ParseError(path.string(), line_no, "seed is not a u64");
        }
        plan.config.seed = v;
      } else if (key == "n_target_speakers") {
        std::size_t v = 0;
        auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
        if (ec != std::errc{} || ptr != value.data() + value.size()) {
          throw ParseError(path.string(), line_no, "n_target_speakers is not an integer");
        }
        plan.config.n_target_speakers = v;
      } else if (key == "halving_rule") {
        try {
          plan.config.halving_rule = halving_rule_from_string(value);
        } catch (const ParseError& e) {
          throw ParseError(path.string(), line_no, e.what());
        }
      } else if (key == "tool_version") {
        plan.tool_version = value;
      } else {
        throw ParseError(path.string(), line_no, "unknown meta key '" + key + "'");
      }
      continue;
    }
    if (current == nullptr) {
      throw ParseError(path.string(), line_no, "id outside of any section");
    }
    if (!current->insert(line).second) {
      throw ParseError(path.string(), line_no, "duplicate id '" + line + "'");
    }
  }

  for (const char* required :
       {"meta", "control_speakers", "target_speakers", "test", "subtarget",
        "subcontrol_a", "subcontrol_b"}) {
    if (seen_sections.count(required) == 0) {
      throw ParseError(path.string() + ": missing section [" + required + "]");
    }
  }

  plan.training_set_a = set_union(plan.subcontrol_a, plan.subcontrol_b);
  plan.training_set_b = set_union(plan.subcontrol_a, plan.subtarget);
  return plan;
}

}  // namespace spkleak

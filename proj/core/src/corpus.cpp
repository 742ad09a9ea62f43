#include "spkleak/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "spkleak/errors.hpp"

namespace spkleak {

namespace {

constexpr const char* kManifestHeader =
    "segment_id,speaker_id,label,phq8_score,feature_refs";

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

// Manifest fields are embedded in a comma/semicolon separated file, so the
// separators cannot appear inside ids or view names.
bool field_clean(const std::string& s) {
  return s.find_first_of(",;\r\n") == std::string::npos;
}

}  // namespace

const char* to_string(Diagnosis d) {
  return d == Diagnosis::kDepressed ? "depressed" : "not_depressed";
}

Diagnosis diagnosis_from_string(std::string_view s) {
  if (s == "depressed") return Diagnosis::kDepressed;
  if (s == "not_depressed") return Diagnosis::kNotDepressed;
  throw ParseError("unknown label '" + std::string(s) +
                   "' (expected depressed or not_depressed)");
}

bool DepressionLabel::consistent() const {
  if (!phq8_score) return true;
  bool should_be_depressed = *phq8_score >= kPhq8Threshold;
  return (value == Diagnosis::kDepressed) == should_be_depressed;
}

Manifest::Manifest(std::vector<Segment> segments) : segments_(std::move(segments)) {
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    Segment& seg = segments_[i];
    auto [it, inserted] = index_by_id_.emplace(seg.segment_id, i);
    if (!inserted) {
      throw ValidationError("duplicate segment_id '" + seg.segment_id + "'");
    }
    std::vector<std::string>& speaker_ids = ids_by_speaker_[seg.speaker_id];
    seg.segment_index = static_cast<int>(speaker_ids.size());
    speaker_ids.push_back(seg.segment_id);
  }
  for (const auto& [speaker, ids] : ids_by_speaker_) {
    speakers_.push_back(speaker);
  }
}

bool Manifest::has_segment(const std::string& segment_id) const {
  return index_by_id_.count(segment_id) != 0;
}

const Segment& Manifest::segment(const std::string& segment_id) const {
  auto it = index_by_id_.find(segment_id);
  if (it == index_by_id_.end()) {
    throw ValidationError("unknown segment_id '" + segment_id + "'");
  }
  return segments_[it->second];
}

const std::vector<std::string>& Manifest::segments_of(
    const std::string& speaker_id) const {
  static const std::vector<std::string> kEmpty;
  auto it = ids_by_speaker_.find(speaker_id);
  return it == ids_by_speaker_.end() ? kEmpty : it->second;
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (const Violation& v : violations) {
    os << v.code << ": " << v.message << "\n";
  }
  return os.str();
}

std::vector<Segment> group_utterances(
    const std::map<std::string, std::vector<UtteranceRecord>>& utterances_by_speaker,
    const std::map<std::string, DepressionLabel>& labels, int group_size) {
  if (group_size < 1) {
    throw ValidationError("group_size must be >= 1, got " +
                          std::to_string(group_size));
  }
  std::vector<Segment> out;
  for (const auto& [speaker, utterances] : utterances_by_speaker) {
    for (std::size_t i = 0; i < utterances.size(); ++i) {
      const UtteranceRecord& u = utterances[i];
      if (u.speaker_id != speaker) {
        throw ValidationError("utterance filed under speaker '" + speaker +
                              "' carries speaker_id '" + u.speaker_id + "'");
      }
      if (i > 0 && u.utterance_index <= utterances[i - 1].utterance_index) {
        throw ValidationError("utterance indices of speaker '" + speaker +
                              "' are not strictly increasing");
      }
      if (u.start_time && u.end_time && *u.end_time < *u.start_time) {
        throw ValidationError("utterance " + std::to_string(u.utterance_index) +
                              " of speaker '" + speaker + "' ends before it starts");
      }
    }
    auto label_it = labels.find(speaker);
    if (label_it == labels.end()) {
      throw ValidationError("no label provided for speaker '" + speaker + "'");
    }
    const std::size_t n_groups = utterances.size() / static_cast<std::size_t>(group_size);
    for (std::size_t g = 0; g < n_groups; ++g) {
      Segment seg;
      char suffix[16];
      std::snprintf(suffix, sizeof(suffix), "_s%04zu", g);
      seg.segment_id = speaker + suffix;
      seg.speaker_id = speaker;
      seg.segment_index = static_cast<int>(g);
      seg.label = label_it->second;
      out.push_back(std::move(seg));
    }
  }
  return out;
}

namespace {

void validate_into(const Manifest& m, const std::set<std::string>* known_views,
                   ValidationReport& report) {
  auto add = [&report](std::string code, std::string message) {
    report.violations.push_back({std::move(code), std::move(message)});
  };

  std::map<std::string, Diagnosis> first_label;
  for (const Segment& seg : m.segments()) {
    if (seg.segment_id.empty()) add("empty_segment_id", "segment with empty id");
    if (seg.speaker_id.empty()) {
      add("empty_speaker_id", "segment '" + seg.segment_id + "' has empty speaker_id");
    }
    if (seg.label.phq8_score) {
      int score = *seg.label.phq8_score;
      if (score < 0 || score > 24) {
        add("phq8_out_of_range", "segment '" + seg.segment_id + "' has phq8_score " +
                                     std::to_string(score) + " outside [0, 24]");
      } else if (!seg.label.consistent()) {
        add("phq8_label_mismatch",
            "segment '" + seg.segment_id + "' has phq8_score " +
                std::to_string(score) + " but label " + to_string(seg.label.value) +
                " (threshold is >= " + std::to_string(kPhq8Threshold) + ")");
      }
    }
    auto [it, inserted] = first_label.emplace(seg.speaker_id, seg.label.value);
    if (!inserted && it->second != seg.label.value) {
      add("mixed_speaker_label",
          "speaker '" + seg.speaker_id + "' carries both labels (segment '" +
              seg.segment_id + "' disagrees); depression is per-subject");
      it->second = seg.label.value;  // report each flip once
    }
    if (known_views != nullptr) {
      for (const std::string& ref : seg.feature_refs) {
        if (known_views->count(ref) == 0) {
          add("dangling_feature_ref", "segment '" + seg.segment_id +
                                          "' references missing feature view '" +
                                          ref + "'");
        }
      }
    }
  }
}

}  // namespace

ValidationReport validate_manifest(const Manifest& m) {
  ValidationReport report;
  validate_into(m, nullptr, report);
  return report;
}

ValidationReport validate_manifest(const Manifest& m,
                                   const std::set<std::string>& known_views) {
  ValidationReport report;
  validate_into(m, &known_views, report);
  return report;
}

Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest file " + path.string());

  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError(path.string(), 1, "empty file");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kManifestHeader) {
    throw ParseError(path.string(), line_no,
                     "bad header; expected '" + std::string(kManifestHeader) + "'");
  }

  std::vector<Segment> segments;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;  // tolerate blank trailing lines
    std::vector<std::string> fields = split_on(line, ',');
    if (fields.size() != 5) {
      throw ParseError(path.string(), line_no,
                       "expected 5 comma-separated fields, got " +
                           std::to_string(fields.size()));
    }
    Segment seg;
    seg.segment_id = fields[0];
    seg.speaker_id = fields[1];
    try {
      seg.label.value = diagnosis_from_string(fields[2]);
    } catch (const ParseError& e) {
      throw ParseError(path.string(), line_no, e.what());
    }
    if (!fields[3].empty()) {
      int score = 0;
      auto [ptr, ec] = std::from_chars(fields[3].data(),
                                       fields[3].data() + fields[3].size(), score);
      if (ec != std::errc{} || ptr != fields[3].data() + fields[3].size()) {
        throw ParseError(path.string(), line_no,
                         "phq8_score '" + fields[3] + "' is not an integer");
      }
      seg.label.phq8_score = score;
    }
    if (!fields[4].empty()) {
      seg.feature_refs = split_on(fields[4], ';');
    }
    segments.push_back(std::move(seg));
  }

  Manifest manifest(std::move(segments));  // rejects duplicate ids
  ValidationReport report = validate_manifest(manifest);
  if (!report.ok()) {
    throw ValidationError("manifest " + path.string() + " is invalid:\n" +
                          report.to_string());
  }
  return manifest;
}

void write_manifest(const Manifest& m, const std::filesystem::path& path) {
  for (const Segment& seg : m.segments()) {
    if (!field_clean(seg.segment_id) || !field_clean(seg.speaker_id)) {
      throw ValidationError("segment '" + seg.segment_id +
                            "' contains a field separator and cannot be serialized");
    }
    for (const std::string& ref : seg.feature_refs) {
      if (!field_clean(ref)) {
        throw ValidationError("feature ref '" + ref + "' of segment '" +
                              seg.segment_id + "' contains a field separator");
      }
    }
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write manifest file " + path.string());
  out << kManifestHeader << "\n";
  for (const Segment& seg : m.segments()) {
    out << seg.segment_id << ',' << seg.speaker_id << ',' << to_string(seg.label.value)
        << ',';
    if (seg.label.phq8_score) out << *seg.label.phq8_score;
    out << ',';
    for (std::size_t i = 0; i < seg.feature_refs.size(); ++i) {
      if (i > 0) out << ';';
      out << seg.feature_refs[i];
    }
    out << "\n";
  }
  if (!out) throw IoError("failed writing manifest file " + path.string());
}

}  // namespace spkleak

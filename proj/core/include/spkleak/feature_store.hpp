#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "spkleak/corpus.hpp"
#include "spkleak/matrix.hpp"

namespace spkleak {

/// One named feature view: a numeric payload per segment. Every payload is a
/// T x D frame matrix with a view-wide D; T = 1 encodes a plain vector.
/// Payloads must be finite. Immutable once loaded.
class FeatureView {
 public:
  FeatureView(std::string name, std::size_t dim);

  const std::string& name() const { return name_; }
  std::size_t dim() const { return dim_; }
  std::size_t segment_count() const { return order_.size(); }

  // Rejects dimension mismatches, non-finite values and duplicate ids.
  void add(const std::string& segment_id, Matrix payload);

  bool has(const std::string& segment_id) const;
  const Matrix& payload(const std::string& segment_id) const;
  const std::vector<std::string>& segment_ids() const { return order_; }

 private:
  std::string name_;
  std::size_t dim_;
  std::vector<std::string> order_;  // insertion order, preserved by the file format
  std::map<std::string, Matrix> payloads_;
};

/// An ordered collection of uniquely named views.
class FeatureViews {
 public:
  void add(FeatureView view);  // rejects duplicate names

  bool has(const std::string& name) const;
  const FeatureView& view(const std::string& name) const;
  const FeatureView& view(std::size_t index) const { return views_.at(index); }
  std::size_t count() const { return views_.size(); }
  std::vector<std::string> names() const;

 private:
  std::vector<FeatureView> views_;
};

/// Column means of a T x D frame matrix: out[d] = (1/T) sum_t frames[t][d].
/// T = 0 is an error (an empty segment has no representation).
std::vector<double> mean_pool(const Matrix& frames);

/// FVW1 feature view file, binary little-endian:
///   magic "FVW1"; u32 segment count; u32 D;
///   per segment: u32 id length, id bytes (UTF-8), u32 frame count T,
///                T*D float64 values row-major.
FeatureView read_view_file(const std::filesystem::path& path);
void write_view_file(const FeatureView& view, const std::filesystem::path& path);

/// Loads the named views and checks that every manifest segment has a payload
/// in every view; missing segments, dimension mismatches and non-finite
/// values are errors naming the segment and view.
FeatureViews load_views(const Manifest& manifest,
                        const std::map<std::string, std::filesystem::path>& paths);

}  // namespace spkleak

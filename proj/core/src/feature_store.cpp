#include "spkleak/feature_store.hpp"

#include <fstream>

#include "binary_io.hpp"
#include "spkleak/errors.hpp"

namespace spkleak {

namespace {
constexpr char kMagic[4] = {'F', 'V', 'W', '1'};
}

FeatureView::FeatureView(std::string name, std::size_t dim)
    : name_(std::move(name)), dim_(dim) {
  if (name_.empty()) throw ValidationError("feature view name must be non-empty");
  if (dim_ == 0) {
    throw ValidationError("feature view '" + name_ + "' must have dim >= 1");
  }
}

void FeatureView::add(const std::string& segment_id, Matrix payload) {
  if (payload.rows == 0) {
    throw ValidationError("view '" + name_ + "': segment '" + segment_id +
                          "' has zero frames");
  }
  if (payload.cols != dim_) {
    throw ValidationError("view '" + name_ + "': segment '" + segment_id +
                          "' has dimension " + std::to_string(payload.cols) +
                          ", expected " + std::to_string(dim_));
  }
  if (!payload.all_finite()) {
    throw ValidationError("view '" + name_ + "': segment '" + segment_id +
                          "' contains a non-finite value");
  }
  auto [it, inserted] = payloads_.emplace(segment_id, std::move(payload));
  if (!inserted) {
    throw ValidationError("view '" + name_ + "': duplicate segment '" + segment_id +
                          "'");
  }
  order_.push_back(segment_id);
}

bool FeatureView::has(const std::string& segment_id) const {
  return payloads_.count(segment_id) != 0;
}

const Matrix& FeatureView::payload(const std::string& segment_id) const {
  auto it = payloads_.find(segment_id);
  if (it == payloads_.end()) {
    throw ValidationError("view '" + name_ + "' has no payload for segment '" +
                          segment_id + "'");
  }
  return it->second;
}

void FeatureViews::add(FeatureView view) {
  if (has(view.name())) {
    throw ValidationError("duplicate feature view name '" + view.name() + "'");
  }
  views_.push_back(std::move(view));
}

bool FeatureViews::has(const std::string& name) const {
  for (const FeatureView& v : views_) {
    if (v.name() == name) return true;
  }
  return false;
}

const FeatureView& FeatureViews::view(const std::string& name) const {
  for (const FeatureView& v : views_) {
    if (v.name() == name) return v;
  }
  throw ValidationError("unknown feature view '" + name + "'");
}

std::vector<std::string> FeatureViews::names() const {
  std::vector<std::string> out;
  out.reserve(views_.size());
  for (const FeatureView& v : views_) out.push_back(v.name());
  return out;
}

std::vector<double> mean_pool(const Matrix& frames) {
  if (frames.rows == 0) throw ValidationError("mean_pool of an empty frame matrix");
  std::vector<double> out(frames.cols, 0.0);
  for (std::size_t t = 0; t < frames.rows; ++t) {
    for (std::size_t d = 0; d < frames.cols; ++d) {
      out[d] += frames.at(t, d);
    }
  }
  const double inv = 1.0 / static_cast<double>(frames.rows);
  for (double& v : out) v *= inv;
  return out;
}

FeatureView read_view_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open feature view file " + path.string());
  const std::string ctx = path.string();

  std::string magic = detail::read_bytes(in, 4, ctx);
  if (magic != std::string(kMagic, 4)) {
    throw ParseError(ctx + ": bad magic (not an FVW1 file)");
  }
  const std::uint32_t n_segments = detail::read_u32(in, ctx);
  const std::uint32_t dim = detail::read_u32(in, ctx);
  if (dim == 0) throw ParseError(ctx + ": dimension must be >= 1");

  FeatureView view(path.stem().string(), dim);
  for (std::uint32_t s = 0; s < n_segments; ++s) {
    const std::uint32_t id_len = detail::read_u32(in, ctx);
    std::string id = detail::read_bytes(in, id_len, ctx);
    const std::uint32_t frames = detail::read_u32(in, ctx);
    if (frames == 0) {
      throw ParseError(ctx + ": segment '" + id + "' has zero frames");
    }
    Matrix payload(frames, dim);
    for (double& v : payload.values) v = detail::read_f64(in, ctx);
    if (!payload.all_finite()) {
      throw ParseError(ctx + ": segment '" + id + "' contains a non-finite value");
    }
    view.add(id, std::move(payload));
  }
  return view;
}

void write_view_file(const FeatureView& view, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write feature view file " + path.string());

  out.write(kMagic, 4);
  detail::write_u32(out, static_cast<std::uint32_t>(view.segment_count()));
  detail::write_u32(out, static_cast<std::uint32_t>(view.dim()));
  for (const std::string& id : view.segment_ids()) {
    detail::write_u32(out, static_cast<std::uint32_t>(id.size()));
    out.write(id.data(), static_cast<std::streamsize>(id.size()));
    const Matrix& payload = view.payload(id);
    detail::write_u32(out, static_cast<std::uint32_t>(payload.rows));
    for (double v : payload.values) detail::write_f64(out, v);
  }
  if (!out) throw IoError("failed writing feature view file " + path.string());
}

FeatureViews load_views(const Manifest& manifest,
                        const std::map<std::string, std::filesystem::path>& paths) {
  FeatureViews views;
  for (const auto& [name, path] : paths) {
    FeatureView view = read_view_file(path);
    // The file stem names the view on disk; the mapping key wins so callers
    // can rename views without rewriting files.
    if (view.name() != name) {
      FeatureView renamed(name, view.dim());
      for (const std::string& id : view.segment_ids()) {
        renamed.add(id, view.payload(id));
      }
      view = std::move(renamed);
    }
    for (const Segment& seg : manifest.segments()) {
      if (!view.has(seg.segment_id)) {
        throw ValidationError("view '" + name + "' is missing segment '" +
                              seg.segment_id + "'");
      }
    }
    views.add(std::move(view));
  }
  return views;
}

}  // namespace spkleak

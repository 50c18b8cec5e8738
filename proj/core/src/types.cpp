#include "annoloop/types.hpp"

#include <cmath>
#include <string>

#include "annoloop/error.hpp"

namespace annoloop {

bool BBox::valid() const noexcept {
  return std::isfinite(xmin) && std::isfinite(ymin) && std::isfinite(xmax) &&
         std::isfinite(ymax) && xmin < xmax && ymin < ymax;
}

BBox BBox::checked(double xmin, double ymin, double xmax, double ymax) {
  BBox b{xmin, ymin, xmax, ymax};
  if (!b.valid()) throw DataError("degenerate bbox");
  return b;
}

Dataset::Dataset(std::vector<ImageRecord> images) : images_(std::move(images)) {
  index_.reserve(images_.size());
  for (std::size_t i = 0; i < images_.size(); ++i) {
    const auto& img = images_[i];
    if (img.id.empty()) throw DataError("empty image id");
    if (!index_.emplace(img.id, i).second) throw DataError("duplicate id \"" + img.id + "\"");
    if (img.width <= 0 || img.height <= 0) {
      throw DataError("image \"" + img.id + "\" has non-positive size");
    }
    for (const auto& obj : img.objects) {
      if (obj.class_name.empty()) throw DataError("image \"" + img.id + "\": empty class name");
      if (!obj.bbox.valid()) throw DataError("image \"" + img.id + "\": degenerate bbox");
      const auto& b = obj.bbox;
      if (b.xmin < -kBoundsTolerance || b.ymin < -kBoundsTolerance ||
          b.xmax > img.width + kBoundsTolerance || b.ymax > img.height + kBoundsTolerance) {
        throw DataError("image \"" + img.id + "\": bbox outside image bounds");
      }
      classes_.insert(obj.class_name);
    }
    total_objects_ += img.objects.size();
  }
}

std::vector<std::string> Dataset::ids() const {
  std::vector<std::string> out;
  out.reserve(images_.size());
  for (const auto& img : images_) out.push_back(img.id);
  return out;
}

std::optional<std::size_t> Dataset::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const ImageRecord& Dataset::at(std::string_view id) const {
  auto pos = find(id);
  if (!pos) throw DataError("unknown image id \"" + std::string(id) + "\"");
  return images_[*pos];
}

FeatureMatrix::FeatureMatrix(std::vector<std::string> ids, std::vector<std::vector<double>> rows)
    : ids_(std::move(ids)) {
  if (ids_.size() != rows.size()) throw DataError("feature id/row count mismatch");
  dim_ = rows.empty() ? 0 : rows.front().size();
  if (!rows.empty() && dim_ == 0) throw DataError("feature dimension must be at least 1");
  values_.reserve(rows.size() * dim_);
  index_.reserve(ids_.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != dim_) throw DataError("ragged feature rows");
    if (!index_.emplace(ids_[i], i).second) throw DataError("duplicate id \"" + ids_[i] + "\"");
    for (double v : rows[i]) {
      if (!std::isfinite(v)) throw DataError("non-finite feature value for \"" + ids_[i] + "\"");
      values_.push_back(v);
    }
  }
}

std::optional<std::size_t> FeatureMatrix::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

FeatureMatrix FeatureMatrix::reordered(std::span<const std::string> order) const {
  if (order.size() != ids_.size()) throw DataError("reorder: id count mismatch");
  std::vector<std::string> ids;
  std::vector<std::vector<double>> rows;
  ids.reserve(order.size());
  rows.reserve(order.size());
  for (const auto& id : order) {
    auto pos = find(id);
    if (!pos) throw DataError("reorder: unknown id \"" + id + "\"");
    auto r = row(*pos);
    ids.push_back(id);
    rows.emplace_back(r.begin(), r.end());
  }
  return FeatureMatrix(std::move(ids), std::move(rows));
}

FeatureMatrix FeatureMatrix::scaled(double factor) const {
  FeatureMatrix out = *this;
  for (double& v : out.values_) v *= factor;
  return out;
}

}  // namespace annoloop

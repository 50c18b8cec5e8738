#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace annoloop {

/// Axis-aligned box in pixel coordinates. Valid boxes have finite
/// coordinates and strictly positive area.
struct BBox {
  double xmin = 0.0;
  double ymin = 0.0;
  double xmax = 0.0;
  double ymax = 0.0;

  [[nodiscard]] double width() const noexcept { return xmax - xmin; }
  [[nodiscard]] double height() const noexcept { return ymax - ymin; }
  [[nodiscard]] double area() const noexcept { return width() * height(); }
  [[nodiscard]] bool valid() const noexcept;

  /// Throws DataError("degenerate bbox") unless valid().
  static BBox checked(double xmin, double ymin, double xmax, double ymax);

  friend bool operator==(const BBox&, const BBox&) = default;
};

struct ObjectLabel {
  std::string class_name;
  BBox bbox;

  friend bool operator==(const ObjectLabel&, const ObjectLabel&) = default;
};

struct ImageRecord {
  std::string id;
  std::optional<std::int64_t> seq;
  int width = 0;
  int height = 0;
  std::vector<ObjectLabel> objects;

  friend bool operator==(const ImageRecord&, const ImageRecord&) = default;
};

/// Tolerance for boxes touching the image border.
inline constexpr double kBoundsTolerance = 1e-6;

/// Ordered collection of images with unique ids. Immutable once built.
class Dataset {
 public:
  Dataset() = default;
  /// Validates id uniqueness, image sizes and box bounds; throws DataError.
  explicit Dataset(std::vector<ImageRecord> images);

  [[nodiscard]] std::span<const ImageRecord> images() const noexcept { return images_; }
  [[nodiscard]] std::size_t size() const noexcept { return images_.size(); }
  [[nodiscard]] bool empty() const noexcept { return images_.empty(); }
  [[nodiscard]] const std::set<std::string>& class_set() const noexcept { return classes_; }
  [[nodiscard]] std::vector<std::string> ids() const;
  [[nodiscard]] std::size_t total_objects() const noexcept { return total_objects_; }

  /// Index of `id` in file order, or nullopt.
  [[nodiscard]] std::optional<std::size_t> find(std::string_view id) const;
  /// Throws DataError for unknown ids.
  [[nodiscard]] const ImageRecord& at(std::string_view id) const;

  friend bool operator==(const Dataset& a, const Dataset& b) { return a.images_ == b.images_; }

 private:
  std::vector<ImageRecord> images_;
  std::set<std::string> classes_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t total_objects_ = 0;
};

/// N feature rows of dimension D, row-major, keyed by image id.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  /// Throws DataError on ragged rows, duplicate ids or non-finite entries.
  FeatureMatrix(std::vector<std::string> ids, std::vector<std::vector<double>> rows);

  [[nodiscard]] std::size_t rows() const noexcept { return ids_.size(); }
  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  [[nodiscard]] const std::vector<std::string>& ids() const noexcept { return ids_; }
  [[nodiscard]] std::span<const double> row(std::size_t i) const noexcept {
    return {values_.data() + i * dim_, dim_};
  }
  [[nodiscard]] std::optional<std::size_t> find(std::string_view id) const;

  /// Rows rearranged to follow `order` (a permutation of ids()).
  [[nodiscard]] FeatureMatrix reordered(std::span<const std::string> order) const;
  /// Every entry multiplied by `factor`.
  [[nodiscard]] FeatureMatrix scaled(double factor) const;

 private:
  std::vector<std::string> ids_;
  std::vector<double> values_;
  std::size_t dim_ = 0;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace annoloop

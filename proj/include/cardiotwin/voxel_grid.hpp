#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "cardiotwin/errors.hpp"

namespace cardiotwin {

// Cardiac structure channel order. Fixed across the whole project; the
// serialized formats and the metric reports rely on it.
enum CardiacClass : int {
  kBackground = 0,
  kMyo = 1,
  kLV = 2,
  kLA = 3,
  kRV = 4,
  kRA = 5,
};

inline constexpr int kDefaultNumClasses = 6;
inline constexpr int kDefaultGridSize = 64;
inline constexpr float kDefaultSpacingMm = 3.0f;

inline const std::array<std::string, 6>& class_names() {
  static const std::array<std::string, 6> names = {"background", "myo", "lv",
                                                   "la",         "rv",  "ra"};
  return names;
}

// Shared geometry/metadata for labeled and probabilistic voxel grids.
struct GridMeta {
  Eigen::Vector3i dims{kDefaultGridSize, kDefaultGridSize, kDefaultGridSize};
  Eigen::Vector3f spacing_mm{kDefaultSpacingMm, kDefaultSpacingMm,
                             kDefaultSpacingMm};
  int num_classes = kDefaultNumClasses;

  std::int64_t num_voxels() const {
    return std::int64_t(dims.x()) * dims.y() * dims.z();
  }
  // Linear voxel index, x fastest. Every flattened buffer in the project
  // uses this order.
  std::int64_t index(int x, int y, int z) const {
    return std::int64_t(x) + std::int64_t(dims.x()) * (y + std::int64_t(dims.y()) * z);
  }
  bool same_geometry(const GridMeta& o) const {
    return dims == o.dims && num_classes == o.num_classes;
  }
  bool same_spacing(const GridMeta& o, float tol = 1e-6f) const {
    return (spacing_mm - o.spacing_mm).cwiseAbs().maxCoeff() <= tol;
  }
  double voxel_volume_ml() const {
    return double(spacing_mm.x()) * spacing_mm.y() * spacing_mm.z() / 1000.0;
  }
};

// One integer class per voxel, x-fastest layout.
class LabelGrid {
 public:
  LabelGrid() = default;
  LabelGrid(GridMeta meta, std::uint8_t fill = 0)
      : meta_(meta), labels_(static_cast<std::size_t>(meta.num_voxels()), fill) {}

  const GridMeta& meta() const { return meta_; }
  GridMeta& meta() { return meta_; }

  std::uint8_t at(int x, int y, int z) const {
    return labels_[static_cast<std::size_t>(meta_.index(x, y, z))];
  }
  std::uint8_t& at(int x, int y, int z) {
    return labels_[static_cast<std::size_t>(meta_.index(x, y, z))];
  }
  std::uint8_t operator[](std::int64_t i) const {
    return labels_[static_cast<std::size_t>(i)];
  }
  std::uint8_t& operator[](std::int64_t i) {
    return labels_[static_cast<std::size_t>(i)];
  }

  const std::vector<std::uint8_t>& data() const { return labels_; }
  std::vector<std::uint8_t>& data() { return labels_; }

  void validate() const {
    if (labels_.size() != static_cast<std::size_t>(meta_.num_voxels()))
      throw DimensionError("label buffer size does not match grid dims");
    for (std::uint8_t v : labels_)
      if (v >= meta_.num_classes)
        throw ValueError("label " + std::to_string(int(v)) +
                         " out of range [0," +
                         std::to_string(meta_.num_classes) + ")");
  }

  bool operator==(const LabelGrid& o) const {
    return meta_.dims == o.meta_.dims && meta_.num_classes == o.meta_.num_classes &&
           labels_ == o.labels_;
  }

 private:
  GridMeta meta_;
  std::vector<std::uint8_t> labels_;
};

// Per-voxel class probabilities. Stored as an N x num_voxels matrix,
// column v = voxel (x fastest), so a per-voxel class vector is contiguous.
template <typename Scalar = float>
class ProbGrid {
 public:
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  ProbGrid() = default;
  explicit ProbGrid(GridMeta meta)
      : meta_(meta), probs_(Mat::Zero(meta.num_classes, meta.num_voxels())) {}
  ProbGrid(GridMeta meta, Mat probs) : meta_(meta), probs_(std::move(probs)) {
    if (probs_.rows() != meta_.num_classes || probs_.cols() != meta_.num_voxels())
      throw DimensionError("probability matrix does not match grid meta");
  }

  const GridMeta& meta() const { return meta_; }
  GridMeta& meta() { return meta_; }
  const Mat& probs() const { return probs_; }
  Mat& probs() { return probs_; }

  // Probability vector of one voxel.
  auto voxel(std::int64_t v) const { return probs_.col(v); }
  auto voxel(std::int64_t v) { return probs_.col(v); }

  bool is_valid(Scalar tol = Scalar(1e-5)) const {
    if (probs_.rows() != meta_.num_classes || probs_.cols() != meta_.num_voxels())
      return false;
    if ((probs_.array() < Scalar(0)).any()) return false;
    return ((probs_.colwise().sum().array() - Scalar(1)).abs() <= tol).all();
  }
  void validate(Scalar tol = Scalar(1e-5)) const {
    if (!is_valid(tol))
      throw FormError("grid is not in valid probs form (nonnegative, per-voxel sum 1)");
  }

 private:
  GridMeta meta_;
  Mat probs_;
};

// One-hot encoding. Throws ValueError on out-of-range labels.
template <typename Scalar = float>
ProbGrid<Scalar> labels_to_probs(const LabelGrid& grid) {
  const GridMeta& m = grid.meta();
  ProbGrid<Scalar> out(m);
  const std::int64_t n = m.num_voxels();
  for (std::int64_t v = 0; v < n; ++v) {
    const std::uint8_t c = grid[v];
    if (c >= m.num_classes)
      throw ValueError("label " + std::to_string(int(c)) + " out of range [0," +
                       std::to_string(m.num_classes) + ")");
    out.probs()(c, v) = Scalar(1);
  }
  return out;
}

// Per-voxel argmax; ties resolve to the lowest class index.
template <typename Scalar>
LabelGrid probs_to_labels(const ProbGrid<Scalar>& grid) {
  const GridMeta& m = grid.meta();
  LabelGrid out(m);
  const std::int64_t n = m.num_voxels();
  for (std::int64_t v = 0; v < n; ++v) {
    Eigen::Index best = 0;
    // colwise maxCoeff with explicit scan keeps the lowest-index tie rule.
    Scalar best_val = grid.probs()(0, v);
    for (Eigen::Index c = 1; c < m.num_classes; ++c) {
      const Scalar p = grid.probs()(c, v);
      if (p > best_val) {
        best_val = p;
        best = c;
      }
    }
    out[v] = static_cast<std::uint8_t>(best);
  }
  return out;
}

}  // namespace cardiotwin

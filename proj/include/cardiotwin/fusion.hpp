#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "cardiotwin/errors.hpp"
#include "cardiotwin/voxel_grid.hpp"

namespace cardiotwin {

// Local-variance adaptive fusion: per-voxel convex combination of candidate
// grids, weighted by 1/(sigma^2 + eps) so low-uncertainty branches dominate.
struct FusionConfig {
  int window = 3;        // odd pooling window side, in voxels
  double epsilon = 1e-6; // variance regularizer

  void validate() const {
    if (window < 1 || window % 2 == 0)
      throw ConfigError("fusion window must be odd and >= 1");
    if (!(epsilon > 0.0)) throw ConfigError("fusion epsilon must be positive");
  }
};

namespace fusion_kernels {

// Same-size separable box mean over a C x M field laid out on `dims`
// (x fastest), replicate padding at borders. Clamping is per axis, so the
// separable passes reproduce the full 3D replicate-padded pooling exactly.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> box_filter_same(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& field,
    const Eigen::Vector3i& dims, int window) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const int half = window / 2;
  const Scalar inv = Scalar(1) / Scalar(window);
  Mat cur = field;
  Mat nxt(field.rows(), field.cols());
  const int n[3] = {dims.x(), dims.y(), dims.z()};
  const std::int64_t stride[3] = {1, dims.x(),
                                  std::int64_t(dims.x()) * dims.y()};
  for (int axis = 0; axis < 3; ++axis) {
    nxt.setZero();
    const int len = n[axis];
    const std::int64_t st = stride[axis];
    // Iterate lines along `axis`; base = index with axis coordinate 0.
    for (int z = 0; z < (axis == 2 ? 1 : n[2]); ++z)
      for (int y = 0; y < (axis == 1 ? 1 : n[1]); ++y)
        for (int x = 0; x < (axis == 0 ? 1 : n[0]); ++x) {
          const std::int64_t base =
              x + std::int64_t(n[0]) * (y + std::int64_t(n[1]) * z);
          for (int i = 0; i < len; ++i) {
            auto acc = nxt.col(base + st * i);
            for (int d = -half; d <= half; ++d) {
              const int j = std::min(len - 1, std::max(0, i + d));
              acc += cur.col(base + st * j);
            }
            acc *= inv;
          }
        }
    std::swap(cur, nxt);
  }
  return cur;
}

// Adjoint of box_filter_same: accumulates into grad_in (same shape).
template <typename Scalar>
void box_filter_same_adjoint_add(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& grad_out,
    const Eigen::Vector3i& dims, int window,
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& grad_in) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const int half = window / 2;
  const Scalar inv = Scalar(1) / Scalar(window);
  Mat cur = grad_out;
  Mat nxt(grad_out.rows(), grad_out.cols());
  const int n[3] = {dims.x(), dims.y(), dims.z()};
  const std::int64_t stride[3] = {1, dims.x(),
                                  std::int64_t(dims.x()) * dims.y()};
  // Forward composes x,y,z passes; the adjoint applies per-axis adjoints in
  // reverse order (z,y,x), each a clamped scatter.
  for (int axis = 2; axis >= 0; --axis) {
    nxt.setZero();
    const int len = n[axis];
    const std::int64_t st = stride[axis];
    for (int z = 0; z < (axis == 2 ? 1 : n[2]); ++z)
      for (int y = 0; y < (axis == 1 ? 1 : n[1]); ++y)
        for (int x = 0; x < (axis == 0 ? 1 : n[0]); ++x) {
          const std::int64_t base =
              x + std::int64_t(n[0]) * (y + std::int64_t(n[1]) * z);
          for (int i = 0; i < len; ++i)
            for (int d = -half; d <= half; ++d) {
              const int j = std::min(len - 1, std::max(0, i + d));
              nxt.col(base + st * j) += inv * cur.col(base + st * i);
            }
        }
    std::swap(cur, nxt);
  }
  grad_in += cur;
}

}  // namespace fusion_kernels

// Per-voxel, per-channel local mean E(V) and variance E(V^2) - E(V)^2 via
// 3D average pooling with replicate padding; variance clamped at zero.
template <typename Scalar>
std::pair<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>,
          Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>>
local_moments(const ProbGrid<Scalar>& grid, int window) {
  if (window < 1 || window % 2 == 0)
    throw ConfigError("pooling window must be odd and >= 1");
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Mat mean =
      fusion_kernels::box_filter_same<Scalar>(grid.probs(), grid.meta().dims, window);
  Mat sq = grid.probs().cwiseProduct(grid.probs());
  Mat var = fusion_kernels::box_filter_same<Scalar>(sq, grid.meta().dims, window) -
            mean.cwiseProduct(mean);
  var = var.cwiseMax(Scalar(0));
  return {mean, var};
}

// Normalized per-voxel branch weights from per-channel variance fields.
// Variance is averaged across channels first, giving one scalar weight per
// voxel per branch; weights sum to 1 across branches.
template <typename Scalar>
std::vector<Eigen::Matrix<Scalar, 1, Eigen::Dynamic>> variance_weights(
    const std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>>& variances,
    double epsilon) {
  using Row = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;
  if (variances.empty()) throw ValueError("variance_weights needs >= 1 branch");
  const Eigen::Index m = variances.front().cols();
  std::vector<Row> weights;
  weights.reserve(variances.size());
  Row total = Row::Zero(m);
  for (const auto& var : variances) {
    if (var.cols() != m) throw DimensionError("variance field shapes differ");
    Row w = (var.colwise().mean().array() + Scalar(epsilon)).inverse();
    total += w;
    weights.push_back(std::move(w));
  }
  for (auto& w : weights) w = w.cwiseQuotient(total);
  return weights;
}

// Convenience wrapper for exactly three branches.
template <typename Scalar>
std::array<Eigen::Matrix<Scalar, 1, Eigen::Dynamic>, 3> variance_weights(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& var_x,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& var_y,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& var_z,
    double epsilon) {
  auto w = variance_weights<Scalar>({var_x, var_y, var_z}, epsilon);
  return {w[0], w[1], w[2]};
}

// Variance-weighted convex combination of candidate grids (>= 2), output
// renormalized to valid probs. Generalizes to two inputs, the form used by
// the inference-time topology refinement.
template <typename Scalar>
ProbGrid<Scalar> dynamic_fuse(const std::vector<ProbGrid<Scalar>>& grids,
                              const FusionConfig& config) {
  config.validate();
  if (grids.size() < 2) throw ValueError("dynamic_fuse needs >= 2 input grids");
  const GridMeta& m0 = grids.front().meta();
  for (const auto& g : grids) {
    if (!g.meta().same_geometry(m0) || !g.meta().same_spacing(m0))
      throw DimensionError("fusion inputs must share dims, spacing and classes");
  }

  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  std::vector<Mat> variances;
  variances.reserve(grids.size());
  for (const auto& g : grids)
    variances.push_back(local_moments(g, config.window).second);
  const auto weights = variance_weights<Scalar>(variances, config.epsilon);

  ProbGrid<Scalar> out(m0);
  out.meta().spacing_mm = m0.spacing_mm;
  Mat& acc = out.probs();
  acc.setZero();
  for (std::size_t b = 0; b < grids.size(); ++b)
    acc += grids[b].probs() * weights[b].asDiagonal();
  // Convex combination of probs already sums to ~1; renormalize to kill
  // round-off drift.
  Eigen::Matrix<Scalar, 1, Eigen::Dynamic> sums = acc.colwise().sum();
  acc = acc * sums.cwiseMax(Scalar(1e-12)).cwiseInverse().asDiagonal();
  return out;
}

}  // namespace cardiotwin

#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>

#include "cardiotwin/errors.hpp"
#include "cardiotwin/voxel_grid.hpp"

namespace cardiotwin {

// Patch dims along (x,y,z); each must divide the corresponding grid dim.
struct PatchSpec {
  Eigen::Vector3i patch_dims{8, 8, 8};

  PatchSpec() = default;
  PatchSpec(int px, int py, int pz) : patch_dims(px, py, pz) {}

  bool divides(const Eigen::Vector3i& dims) const {
    for (int a = 0; a < 3; ++a)
      if (patch_dims[a] <= 0 || dims[a] % patch_dims[a] != 0) return false;
    return true;
  }
  Eigen::Vector3i blocks(const Eigen::Vector3i& dims) const {
    return Eigen::Vector3i(dims.x() / patch_dims.x(), dims.y() / patch_dims.y(),
                           dims.z() / patch_dims.z());
  }
  std::int64_t token_count(const Eigen::Vector3i& dims) const {
    const Eigen::Vector3i b = blocks(dims);
    return std::int64_t(b.x()) * b.y() * b.z();
  }
  std::int64_t feature_width(int num_classes) const {
    return std::int64_t(num_classes) * patch_dims.x() * patch_dims.y() *
           patch_dims.z();
  }
  bool operator==(const PatchSpec& o) const { return patch_dims == o.patch_dims; }
};

// The three anisotropic refinement partitions derived from an (even)
// isotropic patch size p: halved along exactly one axis each.
inline std::array<PatchSpec, 3> refinement_specs(int p) {
  if (p % 2 != 0) throw ConfigError("refinement partitions require even patch size");
  return {PatchSpec(p / 2, p, p), PatchSpec(p, p / 2, p), PatchSpec(p, p, p / 2)};
}

// Index conventions, shared by every patchify/depatchify path:
//   token  l = bx + nbx*(by + nby*bz)            (patch coords, x fastest)
//   feature f = ((c*pz + lz)*py + ly)*px + lx    (class-major, then z,y,x)
// where (bx,by,bz) are patch-block coordinates, (lx,ly,lz) in-patch offsets.
struct PatchLayout {
  Eigen::Vector3i grid_dims;
  Eigen::Vector3i patch_dims;
  Eigen::Vector3i blocks;
  int num_classes = 0;
  std::int64_t tokens = 0;
  std::int64_t features = 0;

  PatchLayout(const Eigen::Vector3i& dims, const PatchSpec& spec, int n_classes)
      : grid_dims(dims),
        patch_dims(spec.patch_dims),
        blocks(spec.blocks(dims)),
        num_classes(n_classes),
        tokens(spec.token_count(dims)),
        features(spec.feature_width(n_classes)) {
    if (!spec.divides(dims))
      throw DimensionError("patch dims do not divide grid dims exactly");
  }

  std::int64_t token_of(int bx, int by, int bz) const {
    return bx + std::int64_t(blocks.x()) * (by + std::int64_t(blocks.y()) * bz);
  }
  std::int64_t feature_of(int c, int lx, int ly, int lz) const {
    return ((std::int64_t(c) * patch_dims.z() + lz) * patch_dims.y() + ly) *
               patch_dims.x() +
           lx;
  }
  std::int64_t voxel_of(int bx, int by, int bz, int lx, int ly, int lz) const {
    const std::int64_t x = std::int64_t(bx) * patch_dims.x() + lx;
    const std::int64_t y = std::int64_t(by) * patch_dims.y() + ly;
    const std::int64_t z = std::int64_t(bz) * patch_dims.z() + lz;
    return x + grid_dims.x() * (y + std::int64_t(grid_dims.y()) * z);
  }
};

// Patchified voxel embeddings: L tokens of width F, row = token.
template <typename Scalar = float>
struct TokenSequence {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Mat tokens;  // L x F
  PatchSpec spec;
  Eigen::Vector3i source_dims{0, 0, 0};
  Eigen::Vector3f source_spacing_mm{kDefaultSpacingMm, kDefaultSpacingMm,
                                    kDefaultSpacingMm};
  int num_classes = 0;

  void validate() const {
    PatchLayout layout(source_dims, spec, num_classes);
    if (tokens.rows() != layout.tokens || tokens.cols() != layout.features)
      throw DimensionError("token matrix inconsistent with patch spec");
  }
};

// Splits a probs grid into flattened patch tokens. Deterministic layout per
// the conventions above; exact inverse is depatchify().
template <typename Scalar>
TokenSequence<Scalar> patchify(const ProbGrid<Scalar>& grid, const PatchSpec& spec) {
  const GridMeta& m = grid.meta();
  PatchLayout layout(m.dims, spec, m.num_classes);

  TokenSequence<Scalar> out;
  out.spec = spec;
  out.source_dims = m.dims;
  out.source_spacing_mm = m.spacing_mm;
  out.num_classes = m.num_classes;
  out.tokens.resize(layout.tokens, layout.features);

  const auto& P = grid.probs();
  for (int bz = 0; bz < layout.blocks.z(); ++bz)
    for (int by = 0; by < layout.blocks.y(); ++by)
      for (int bx = 0; bx < layout.blocks.x(); ++bx) {
        const std::int64_t l = layout.token_of(bx, by, bz);
        for (int c = 0; c < layout.num_classes; ++c)
          for (int lz = 0; lz < layout.patch_dims.z(); ++lz)
            for (int ly = 0; ly < layout.patch_dims.y(); ++ly)
              for (int lx = 0; lx < layout.patch_dims.x(); ++lx)
                out.tokens(l, layout.feature_of(c, lx, ly, lz)) =
                    P(c, layout.voxel_of(bx, by, bz, lx, ly, lz));
      }
  return out;
}

// Exact inverse of patchify; bit-identical roundtrip.
template <typename Scalar>
ProbGrid<Scalar> depatchify(const TokenSequence<Scalar>& seq) {
  seq.validate();
  PatchLayout layout(seq.source_dims, seq.spec, seq.num_classes);

  GridMeta meta;
  meta.dims = seq.source_dims;
  meta.spacing_mm = seq.source_spacing_mm;
  meta.num_classes = seq.num_classes;
  ProbGrid<Scalar> out(meta);

  auto& P = out.probs();
  for (int bz = 0; bz < layout.blocks.z(); ++bz)
    for (int by = 0; by < layout.blocks.y(); ++by)
      for (int bx = 0; bx < layout.blocks.x(); ++bx) {
        const std::int64_t l = layout.token_of(bx, by, bz);
        for (int c = 0; c < layout.num_classes; ++c)
          for (int lz = 0; lz < layout.patch_dims.z(); ++lz)
            for (int ly = 0; ly < layout.patch_dims.y(); ++ly)
              for (int lx = 0; lx < layout.patch_dims.x(); ++lx)
                P(c, layout.voxel_of(bx, by, bz, lx, ly, lz)) =
                    seq.tokens(l, layout.feature_of(c, lx, ly, lz));
      }
  return out;
}

}  // namespace cardiotwin

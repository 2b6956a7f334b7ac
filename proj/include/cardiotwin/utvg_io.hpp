#pragma once

#include <string>

#include "cardiotwin/voxel_grid.hpp"

namespace cardiotwin {

// "UTVG v1" label-grid file:
//   magic "UTVG", u8 version=1, u8 num_classes,
//   u16 dims[3], f32 spacing_mm[3] (little-endian),
//   then dims-product u8 labels, x fastest.
// Probability grids are never persisted.
void write_utvg(const std::string& path, const LabelGrid& grid);
LabelGrid read_utvg(const std::string& path);

}  // namespace cardiotwin

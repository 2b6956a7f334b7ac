#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "cardiotwin/voxel_grid.hpp"

namespace cardiotwin {

// Per-case evaluation results. Metrics are computed in double precision.
// hd_mm is the mean over foreground classes whose masks are non-empty on
// both sides; hd_valid_classes counts them (0 leaves hd_mm unset).
struct CaseMetrics {
  std::vector<double> dsc_per_class;  // foreground classes 1..N-1
  double dsc_avg = 0.0;
  std::optional<double> hd_mm;
  int hd_valid_classes = 0;
  double evol_ml = 0.0;
};

// Dice similarity coefficient 2|A∩B|/(|A|+|B|) for one foreground class.
// Both-empty returns 1.0; exactly one empty returns 0.0.
double dice(const LabelGrid& pred, const LabelGrid& gt, int class_id);

// Symmetric Hausdorff distance (maximum, i.e. 100th percentile by default)
// between surface-voxel center point sets, in mm via spacing. A surface
// voxel is a mask voxel with at least one six-connected neighbor outside
// the mask (or outside the grid). Returns nullopt when either mask is
// empty. `percentile` in (0,100] selects the directed-distance percentile.
std::optional<double> hausdorff(const LabelGrid& pred, const LabelGrid& gt,
                                int class_id, double percentile = 100.0);

// Mean over foreground classes of |count_pred - count_gt| * voxel volume,
// in milliliters.
double volumetric_error(const LabelGrid& pred, const LabelGrid& gt);
// Per-class variant, same units.
std::vector<double> volumetric_error_per_class(const LabelGrid& pred,
                                               const LabelGrid& gt);

CaseMetrics evaluate_case(const LabelGrid& pred, const LabelGrid& gt);

// Surface voxel centers (mm) of one class mask; exposed for testing and
// for the Hausdorff implementation.
std::vector<Eigen::Vector3d> surface_points(const LabelGrid& grid, int class_id);

// JSON metrics report: one row per case plus dataset means and standard
// deviations. Fixed column names: dsc_myo, dsc_lv, dsc_la, dsc_rv, dsc_ra,
// dsc_avg, hd_mm, evol_ml.
std::string metrics_report_json(
    const std::vector<std::pair<std::string, CaseMetrics>>& cases);

}  // namespace cardiotwin

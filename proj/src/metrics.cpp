#include "cardiotwin/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "cardiotwin/errors.hpp"

namespace cardiotwin {

namespace {

void check_compatible(const LabelGrid& pred, const LabelGrid& gt) {
  if (pred.meta().dims != gt.meta().dims)
    throw DimensionError("prediction and ground-truth dims differ");
  if (pred.meta().num_classes != gt.meta().num_classes)
    throw DimensionError("prediction and ground-truth class counts differ");
}

void check_class(const LabelGrid& g, int class_id) {
  if (class_id < 1 || class_id >= g.meta().num_classes)
    throw ValueError("class id " + std::to_string(class_id) +
                     " outside foreground range [1," +
                     std::to_string(g.meta().num_classes) + ")");
}

// Directed distances from each point of `from` to nearest point of `to`.
std::vector<double> directed_sq_distances(const std::vector<Eigen::Vector3d>& from,
                                          const std::vector<Eigen::Vector3d>& to) {
  std::vector<double> out;
  out.reserve(from.size());
  for (const auto& p : from) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : to) {
      const double dx = p.x() - q.x();
      const double dy = p.y() - q.y();
      const double dz = p.z() - q.z();
      const double d2 = dx * dx + dy * dy + dz * dz;
      if (d2 < best) best = d2;
    }
    out.push_back(best);
  }
  return out;
}

double percentile_of(std::vector<double> v, double pct) {
  std::sort(v.begin(), v.end());
  if (pct >= 100.0) return v.back();
  const double rank = pct / 100.0 * double(v.size() - 1);
  const std::size_t lo = std::size_t(std::floor(rank));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = rank - double(lo);
  return v[lo] * (1.0 - frac) + v[hi] * frac;
}

}  // namespace

double dice(const LabelGrid& pred, const LabelGrid& gt, int class_id) {
  check_compatible(pred, gt);
  check_class(pred, class_id);
  const std::int64_t n = pred.meta().num_voxels();
  std::int64_t a = 0, b = 0, inter = 0;
  for (std::int64_t v = 0; v < n; ++v) {
    const bool in_a = pred[v] == class_id;
    const bool in_b = gt[v] == class_id;
    a += in_a;
    b += in_b;
    inter += in_a && in_b;
  }
  if (a + b == 0) return 1.0;
  return 2.0 * double(inter) / double(a + b);
}

std::vector<Eigen::Vector3d> surface_points(const LabelGrid& grid, int class_id) {
  const GridMeta& m = grid.meta();
  std::vector<Eigen::Vector3d> pts;
  const int nx = m.dims.x(), ny = m.dims.y(), nz = m.dims.z();
  auto in_mask = [&](int x, int y, int z) {
    if (x < 0 || y < 0 || z < 0 || x >= nx || y >= ny || z >= nz) return false;
    return grid.at(x, y, z) == class_id;
  };
  for (int z = 0; z < nz; ++z)
    for (int y = 0; y < ny; ++y)
      for (int x = 0; x < nx; ++x) {
        if (grid.at(x, y, z) != class_id) continue;
        const bool surface = !in_mask(x - 1, y, z) || !in_mask(x + 1, y, z) ||
                             !in_mask(x, y - 1, z) || !in_mask(x, y + 1, z) ||
                             !in_mask(x, y, z - 1) || !in_mask(x, y, z + 1);
        if (surface)
          pts.emplace_back(double(x) * m.spacing_mm.x(),
                           double(y) * m.spacing_mm.y(),
                           double(z) * m.spacing_mm.z());
      }
  return pts;
}

std::optional<double> hausdorff(const LabelGrid& pred, const LabelGrid& gt,
                                int class_id, double percentile) {
  check_compatible(pred, gt);
  check_class(pred, class_id);
  if (!pred.meta().same_spacing(gt.meta()))
    throw ValueError("prediction and ground-truth spacing differ");
  if (percentile <= 0.0 || percentile > 100.0)
    throw ValueError("HD percentile must be in (0,100]");

  const auto sp = surface_points(pred, class_id);
  const auto sg = surface_points(gt, class_id);
  if (sp.empty() || sg.empty()) return std::nullopt;

  auto d_pg = directed_sq_distances(sp, sg);
  auto d_gp = directed_sq_distances(sg, sp);
  const double h_pg = percentile_of(std::move(d_pg), percentile);
  const double h_gp = percentile_of(std::move(d_gp), percentile);
  return std::sqrt(std::max(h_pg, h_gp));
}

std::vector<double> volumetric_error_per_class(const LabelGrid& pred,
                                               const LabelGrid& gt) {
  check_compatible(pred, gt);
  if (!pred.meta().same_spacing(gt.meta()))
    throw ValueError("prediction and ground-truth spacing differ");
  const int n_classes = pred.meta().num_classes;
  std::vector<std::int64_t> cp(n_classes, 0), cg(n_classes, 0);
  const std::int64_t n = pred.meta().num_voxels();
  for (std::int64_t v = 0; v < n; ++v) {
    ++cp[pred[v]];
    ++cg[gt[v]];
  }
  const double vol_ml = pred.meta().voxel_volume_ml();
  std::vector<double> out;
  out.reserve(std::size_t(n_classes) - 1);
  for (int c = 1; c < n_classes; ++c)
    out.push_back(double(std::llabs(cp[c] - cg[c])) * vol_ml);
  return out;
}

double volumetric_error(const LabelGrid& pred, const LabelGrid& gt) {
  const auto per_class = volumetric_error_per_class(pred, gt);
  double sum = 0.0;
  for (double e : per_class) sum += e;
  return sum / double(per_class.size());
}

CaseMetrics evaluate_case(const LabelGrid& pred, const LabelGrid& gt) {
  check_compatible(pred, gt);
  const int n_classes = pred.meta().num_classes;
  CaseMetrics cm;
  double dsc_sum = 0.0;
  double hd_sum = 0.0;
  for (int c = 1; c < n_classes; ++c) {
    const double d = dice(pred, gt, c);
    cm.dsc_per_class.push_back(d);
    dsc_sum += d;
    if (const auto hd = hausdorff(pred, gt, c)) {
      hd_sum += *hd;
      ++cm.hd_valid_classes;
    }
  }
  cm.dsc_avg = dsc_sum / double(n_classes - 1);
  if (cm.hd_valid_classes > 0) cm.hd_mm = hd_sum / double(cm.hd_valid_classes);
  cm.evol_ml = volumetric_error(pred, gt);
  return cm;
}

std::string metrics_report_json(
    const std::vector<std::pair<std::string, CaseMetrics>>& cases) {
  static const char* kDscCols[] = {"dsc_myo", "dsc_lv", "dsc_la", "dsc_rv",
                                   "dsc_ra"};
  nlohmann::ordered_json doc;
  doc["cases"] = nlohmann::ordered_json::array();

  std::vector<std::vector<double>> columns(8);
  for (const auto& [id, cm] : cases) {
    nlohmann::ordered_json row;
    row["case_id"] = id;
    for (std::size_t c = 0; c < cm.dsc_per_class.size() && c < 5; ++c) {
      row[kDscCols[c]] = cm.dsc_per_class[c];
      columns[c].push_back(cm.dsc_per_class[c]);
    }
    row["dsc_avg"] = cm.dsc_avg;
    columns[5].push_back(cm.dsc_avg);
    if (cm.hd_mm) {
      row["hd_mm"] = *cm.hd_mm;
      columns[6].push_back(*cm.hd_mm);
    } else {
      row["hd_mm"] = nullptr;
    }
    row["evol_ml"] = cm.evol_ml;
    columns[7].push_back(cm.evol_ml);
    doc["cases"].push_back(std::move(row));
  }

  auto stats = [](const std::vector<double>& v) {
    nlohmann::ordered_json s;
    if (v.empty()) {
      s["mean"] = nullptr;
      s["std"] = nullptr;
      return s;
    }
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= double(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    var /= double(v.size());
    s["mean"] = mean;
    s["std"] = std::sqrt(var);
    return s;
  };

  static const char* kAllCols[] = {"dsc_myo", "dsc_lv",  "dsc_la", "dsc_rv",
                                   "dsc_ra",  "dsc_avg", "hd_mm",  "evol_ml"};
  nlohmann::ordered_json agg;
  for (int c = 0; c < 8; ++c) agg[kAllCols[c]] = stats(columns[c]);
  agg["hd_excluded_cases"] =
      int(cases.size()) - int(columns[6].size());
  doc["aggregate"] = std::move(agg);
  return doc.dump(2);
}

}  // namespace cardiotwin

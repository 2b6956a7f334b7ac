#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <optional>
#include <string>

namespace cardiotwin {

enum class CardiacPhase { ED, ES };

inline std::string phase_name(CardiacPhase p) {
  return p == CardiacPhase::ED ? "ED" : "ES";
}
CardiacPhase phase_from_name(const std::string& s);

// One 2D view: grayscale pixels in [0,1] with physical pixel spacing.
// Canonical view names are A2C, A4C, PSAX_PAP; others are accepted.
struct ViewImage {
  Eigen::MatrixXf pixels;  // H x W
  Eigen::Vector2d spacing_mm_per_px{0.5, 0.5};
  std::string view_name = "A4C";
  CardiacPhase phase = CardiacPhase::ED;
  int frame_index = 0;

  // Synthetic frames may carry a noiseless label slice next to the image;
  // the oracle frame detector consumes it.
  std::optional<std::string> labels_path;

  int height() const { return int(pixels.rows()); }
  int width() const { return int(pixels.cols()); }
};

inline constexpr int kViewImageSize = 224;

// Fixed canonical ordering used whenever multiple views are stacked.
inline const std::array<std::string, 3>& canonical_view_order() {
  static const std::array<std::string, 3> order = {"A2C", "A4C", "PSAX_PAP"};
  return order;
}

// 8-bit binary PGM (P5). Values are quantized as round(v * 255).
void write_pgm(const std::string& path, const Eigen::MatrixXf& pixels);
Eigen::MatrixXf read_pgm(const std::string& path);

// Raw 8-bit PGM helpers for label slices (values stored verbatim).
void write_pgm_raw(const std::string& path,
                   const Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>& v);
Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> read_pgm_raw(
    const std::string& path);

// ViewImage with its JSON sidecar {view_name, spacing_mm_per_px, phase,
// frame_index}. The sidecar lives at <image>.json.
void write_view_image(const std::string& pgm_path, const ViewImage& view);
ViewImage read_view_image(const std::string& pgm_path);

}  // namespace cardiotwin

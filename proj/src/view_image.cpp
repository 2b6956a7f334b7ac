#include "cardiotwin/view_image.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "cardiotwin/errors.hpp"

namespace cardiotwin {

CardiacPhase phase_from_name(const std::string& s) {
  if (s == "ED") return CardiacPhase::ED;
  if (s == "ES") return CardiacPhase::ES;
  throw ValueError("unknown cardiac phase: " + s);
}

namespace {

using ByteMat = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

void write_pgm_bytes(const std::string& path, const ByteMat& v) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for write: " + path);
  os << "P5\n" << v.cols() << " " << v.rows() << "\n255\n";
  // Row-major pixel stream.
  for (Eigen::Index r = 0; r < v.rows(); ++r)
    for (Eigen::Index c = 0; c < v.cols(); ++c) os.put(char(v(r, c)));
  if (!os) throw IoError("write failed: " + path);
}

ByteMat read_pgm_bytes(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open: " + path);
  std::string magic;
  is >> magic;
  if (magic != "P5") throw IoError("not a binary PGM (P5): " + path);
  // Skip whitespace and '#' comment lines between header tokens.
  auto next_int = [&is, &path]() {
    int ch = is.peek();
    while (ch == ' ' || ch == '\n' || ch == '\r' || ch == '\t' || ch == '#') {
      if (ch == '#') is.ignore(1 << 16, '\n');
      else is.get();
      ch = is.peek();
    }
    long v = -1;
    is >> v;
    if (!is || v < 0) throw IoError("corrupt PGM header: " + path);
    return v;
  };
  const long w = next_int();
  const long h = next_int();
  const long maxval = next_int();
  if (maxval != 255) throw IoError("only 8-bit PGM supported: " + path);
  is.get();  // single whitespace after maxval
  ByteMat v(h, w);
  for (long r = 0; r < h; ++r)
    for (long c = 0; c < w; ++c) {
      const int byte = is.get();
      if (byte < 0) throw IoError("truncated PGM payload: " + path);
      v(r, c) = std::uint8_t(byte);
    }
  return v;
}

}  // namespace

void write_pgm(const std::string& path, const Eigen::MatrixXf& pixels) {
  ByteMat v(pixels.rows(), pixels.cols());
  for (Eigen::Index r = 0; r < pixels.rows(); ++r)
    for (Eigen::Index c = 0; c < pixels.cols(); ++c) {
      const float p = std::min(1.0f, std::max(0.0f, pixels(r, c)));
      v(r, c) = std::uint8_t(std::lround(p * 255.0f));
    }
  write_pgm_bytes(path, v);
}

Eigen::MatrixXf read_pgm(const std::string& path) {
  const ByteMat v = read_pgm_bytes(path);
  return v.cast<float>() / 255.0f;
}

void write_pgm_raw(const std::string& path, const ByteMat& v) {
  write_pgm_bytes(path, v);
}

ByteMat read_pgm_raw(const std::string& path) { return read_pgm_bytes(path); }

void write_view_image(const std::string& pgm_path, const ViewImage& view) {
  write_pgm(pgm_path, view.pixels);
  nlohmann::ordered_json j;
  j["view_name"] = view.view_name;
  j["spacing_mm_per_px"] = {view.spacing_mm_per_px.x(), view.spacing_mm_per_px.y()};
  j["phase"] = phase_name(view.phase);
  j["frame_index"] = view.frame_index;
  if (view.labels_path)
    j["labels_pgm"] = *view.labels_path;
  std::ofstream os(pgm_path + ".json");
  if (!os) throw IoError("cannot open for write: " + pgm_path + ".json");
  os << j.dump(2) << "\n";
}

ViewImage read_view_image(const std::string& pgm_path) {
  ViewImage view;
  view.pixels = read_pgm(pgm_path);
  const std::string sidecar = pgm_path + ".json";
  std::ifstream is(sidecar);
  if (!is) throw IoError("missing view sidecar: " + sidecar);
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("bad view sidecar " + sidecar + ": " + e.what());
  }
  view.view_name = j.at("view_name").get<std::string>();
  const auto sp = j.at("spacing_mm_per_px");
  view.spacing_mm_per_px = Eigen::Vector2d(sp.at(0).get<double>(), sp.at(1).get<double>());
  view.phase = phase_from_name(j.at("phase").get<std::string>());
  view.frame_index = j.value("frame_index", 0);
  if (j.contains("labels_pgm")) {
    // Resolve relative to the image location.
    const auto dir = std::filesystem::path(pgm_path).parent_path();
    view.labels_path = (dir / j["labels_pgm"].get<std::string>()).string();
  }
  return view;
}

}  // namespace cardiotwin

#include "cardiotwin/utvg_io.hpp"

#include <cstring>
#include <fstream>

#include "cardiotwin/errors.hpp"

namespace cardiotwin {

namespace {

void put_u16le(std::ostream& os, std::uint16_t v) {
  const char b[2] = {char(v & 0xff), char((v >> 8) & 0xff)};
  os.write(b, 2);
}

std::uint16_t get_u16le(std::istream& is) {
  unsigned char b[2];
  is.read(reinterpret_cast<char*>(b), 2);
  return std::uint16_t(b[0]) | (std::uint16_t(b[1]) << 8);
}

void put_f32le(std::ostream& os, float v) {
  std::uint32_t u;
  std::memcpy(&u, &v, 4);
  const char b[4] = {char(u & 0xff), char((u >> 8) & 0xff), char((u >> 16) & 0xff),
                     char((u >> 24) & 0xff)};
  os.write(b, 4);
}

float get_f32le(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  std::uint32_t u = std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) |
                    (std::uint32_t(b[2]) << 16) | (std::uint32_t(b[3]) << 24);
  float v;
  std::memcpy(&v, &u, 4);
  return v;
}

}  // namespace

void write_utvg(const std::string& path, const LabelGrid& grid) {
  grid.validate();
  const GridMeta& m = grid.meta();
  for (int a = 0; a < 3; ++a)
    if (m.dims[a] <= 0 || m.dims[a] > 0xffff)
      throw ValueError("UTVG dims must fit in u16");
  if (m.num_classes <= 0 || m.num_classes > 255)
    throw ValueError("UTVG num_classes must fit in u8");

  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for write: " + path);
  os.write("UTVG", 4);
  os.put(char(1));
  os.put(char(m.num_classes));
  for (int a = 0; a < 3; ++a) put_u16le(os, std::uint16_t(m.dims[a]));
  for (int a = 0; a < 3; ++a) put_f32le(os, m.spacing_mm[a]);
  os.write(reinterpret_cast<const char*>(grid.data().data()),
           std::streamsize(grid.data().size()));
  if (!os) throw IoError("write failed: " + path);
}

LabelGrid read_utvg(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "UTVG", 4) != 0)
    throw IoError("not a UTVG file: " + path);
  const int version = is.get();
  if (version != 1) throw IoError("unsupported UTVG version in " + path);

  GridMeta m;
  m.num_classes = is.get();
  for (int a = 0; a < 3; ++a) m.dims[a] = get_u16le(is);
  for (int a = 0; a < 3; ++a) m.spacing_mm[a] = get_f32le(is);
  if (!is || m.num_classes <= 0 || m.dims.minCoeff() <= 0 ||
      m.spacing_mm.minCoeff() <= 0.0f)
    throw IoError("corrupt UTVG header in " + path);

  LabelGrid grid(m);
  is.read(reinterpret_cast<char*>(grid.data().data()),
          std::streamsize(grid.data().size()));
  if (!is) throw IoError("truncated UTVG payload in " + path);
  grid.validate();
  return grid;
}

}  // namespace cardiotwin

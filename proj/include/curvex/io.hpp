#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <string>
#include <system_error>
#include <vector>

#include "curvex/basin.hpp"
#include "curvex/types.hpp"

namespace curvex {

/// Locale-independent float formatting with 17 significant digits
/// (round-trip exact), the format used in every CSV this library emits.
inline std::string format_double(double v) {
  char buf[64];
  const auto res =
      std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

/// Minimal CSV writer: comma separators, '\n' line endings, no quoting
/// (fields never contain commas here).
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path)
      : out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw EvaluationError("cannot open '" + path + "' for writing");
  }

  void header(const std::vector<std::string>& cols) { raw_row(cols); }

  void row(const std::vector<std::string>& cells) { raw_row(cells); }

  static std::string cell(double v) { return format_double(v); }
  static std::string cell(long v) { return std::to_string(v); }
  static std::string cell(int v) { return std::to_string(v); }

 private:
  void raw_row(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }
  std::ofstream out_;
};

/// Binary PPM (P6) rendering of a basin raster for quick viewing.
/// Attractor ids cycle through a small fixed palette; unresolved cells are
/// gray. Row 0 of the image is the top of the grid (largest y).
inline void write_basin_ppm(const std::string& path,
                            const BasinRaster& raster) {
  static const unsigned char palette[][3] = {
      {46, 139, 87},    // sea green
      {178, 34, 34},    // firebrick
      {65, 105, 225},   // royal blue
      {218, 165, 32},   // goldenrod
      {138, 43, 226},   // blue violet
      {0, 139, 139},    // dark cyan
  };
  constexpr int kPaletteSize = 6;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw EvaluationError("cannot open '" + path + "' for writing");
  out << "P6\n" << raster.grid.nx << " " << raster.grid.ny << "\n255\n";
  for (int iy = raster.grid.ny - 1; iy >= 0; --iy) {
    for (int ix = 0; ix < raster.grid.nx; ++ix) {
      const int label = raster.label_at(ix, iy);
      unsigned char rgb[3] = {160, 160, 160};
      if (label >= 0) {
        const unsigned char* c = palette[label % kPaletteSize];
        rgb[0] = c[0];
        rgb[1] = c[1];
        rgb[2] = c[2];
      }
      out.write(reinterpret_cast<const char*>(rgb), 3);
    }
  }
}

}  // namespace curvex

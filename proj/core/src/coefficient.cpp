#include "gmsfem/coefficient.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace gmsfem {

namespace {

void check_positive(double v, const std::string& what) {
  if (!(v >= std::numeric_limits<double>::min()) || !std::isfinite(v))
    throw std::invalid_argument(what + ": coefficient value must be positive, got " +
                                std::to_string(v));
}

}  // namespace

double CoefficientField::min_value() const {
  return *std::min_element(values.begin(), values.end());
}

double CoefficientField::max_value() const {
  return *std::max_element(values.begin(), values.end());
}

CoefficientField constant_field(Index nx, Index ny, double value) {
  check_positive(value, "constant_field");
  CoefficientField f;
  f.nx = nx;
  f.ny = ny;
  f.values.assign(static_cast<std::size_t>(nx * ny), value);
  return f;
}

CoefficientField channels_field(Index nx, Index ny, double background,
                                double channel_value,
                                const std::vector<CellRect>& channels) {
  check_positive(background, "channels_field background");
  check_positive(channel_value, "channels_field channel value");
  if (channel_value < background)
    throw std::invalid_argument("channels_field: channel value below background");
  CoefficientField f = constant_field(nx, ny, background);
  for (const CellRect& r : channels) {
    if (r.cx0 < 0 || r.cy0 < 0 || r.cx1 >= nx || r.cy1 >= ny || r.cx0 > r.cx1 ||
        r.cy0 > r.cy1)
      throw std::invalid_argument(
          "channels_field: strip [" + std::to_string(r.cx0) + "," +
          std::to_string(r.cx1) + "]x[" + std::to_string(r.cy0) + "," +
          std::to_string(r.cy1) + "] out of range for " + std::to_string(nx) + "x" +
          std::to_string(ny) + " cells");
    for (Index cy = r.cy0; cy <= r.cy1; ++cy)
      for (Index cx = r.cx0; cx <= r.cx1; ++cx)
        f.values[cy * nx + cx] = channel_value;
  }
  return f;
}

CoefficientField parse_raster(std::istream& in, const std::string& origin) {
  Index nx = 0, ny = 0;
  if (!(in >> nx >> ny) || nx < 1 || ny < 1)
    throw std::runtime_error(origin + ": malformed raster header (expected 'nx ny')");
  CoefficientField f;
  f.nx = nx;
  f.ny = ny;
  f.values.resize(static_cast<std::size_t>(nx * ny));
  for (Index cy = 0; cy < ny; ++cy) {
    for (Index cx = 0; cx < nx; ++cx) {
      double v;
      if (!(in >> v))
        throw std::runtime_error(origin + ": truncated raster at row " +
                                 std::to_string(cy) + " col " + std::to_string(cx));
      if (!(v >= std::numeric_limits<double>::min()) || !std::isfinite(v))
        throw std::runtime_error(origin + ": non-positive value at row " +
                                 std::to_string(cy) + " col " + std::to_string(cx));
      f.values[cy * nx + cx] = v;
    }
  }
  return f;
}

CoefficientField load_raster(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_raster: cannot open '" + path + "'");
  return parse_raster(in, path);
}

CoefficientField resample_to(const CoefficientField& field, const FineGrid& fine) {
  if (fine.nx % field.nx != 0 || fine.ny % field.ny != 0)
    throw std::invalid_argument(
        "resample_to: fine cells " + std::to_string(fine.nx) + "x" +
        std::to_string(fine.ny) + " not an integer multiple of field " +
        std::to_string(field.nx) + "x" + std::to_string(field.ny));
  const Index rx = fine.nx / field.nx, ry = fine.ny / field.ny;
  CoefficientField out;
  out.nx = fine.nx;
  out.ny = fine.ny;
  out.values.resize(static_cast<std::size_t>(fine.nx * fine.ny));
  for (Index cy = 0; cy < fine.ny; ++cy)
    for (Index cx = 0; cx < fine.nx; ++cx)
      out.values[cy * fine.nx + cx] = field.value(cx / rx, cy / ry);
  return out;
}

}  // namespace gmsfem

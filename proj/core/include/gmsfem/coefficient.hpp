#ifndef GMSFEM_COEFFICIENT_HPP
#define GMSFEM_COEFFICIENT_HPP

#include <string>
#include <vector>

#include "gmsfem/grid.hpp"

namespace gmsfem {

/// Piecewise-constant positive coefficient kappa, one value per fine cell.
/// Cell (cx, cy) has value values[cy*nx + cx]; row 0 is the bottom row.
struct CoefficientField {
  Index nx = 0, ny = 0;
  std::vector<double> values;

  double value(Index cx, Index cy) const { return values[cy * nx + cx]; }
  double min_value() const;
  double max_value() const;
  double contrast() const { return max_value() / min_value(); }
};

/// Axis-aligned strip of fine cells, inclusive cell-index bounds.
struct CellRect {
  Index cx0 = 0, cy0 = 0, cx1 = 0, cy1 = 0;
};

CoefficientField constant_field(Index nx, Index ny, double value);

CoefficientField channels_field(Index nx, Index ny, double background,
                                double channel_value,
                                const std::vector<CellRect>& channels);

/// ASCII raster: header "nx ny", then ny rows of nx positive reals,
/// row 0 = bottom row.
CoefficientField load_raster(const std::string& path);
CoefficientField parse_raster(std::istream& in, const std::string& origin);

/// Piecewise-constant injection onto a finer grid with integer refinement.
CoefficientField resample_to(const CoefficientField& field, const FineGrid& fine);

}  // namespace gmsfem

#endif

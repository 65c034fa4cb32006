#ifndef GMSFEM_GRID_HPP
#define GMSFEM_GRID_HPP

#include <cstdint>
#include <vector>

namespace gmsfem {

using Index = std::int64_t;

/// Structured fine grid on the unit square. Nodes are numbered row-major,
/// node(ix, iy) = iy*(nx+1) + ix, with (0,0) the bottom-left corner.
struct FineGrid {
  Index nx = 0, ny = 0;   // cell counts per axis
  double hx = 0, hy = 0;  // cell widths, hx = 1/nx, hy = 1/ny

  Index num_nodes() const { return (nx + 1) * (ny + 1); }
  Index num_cells() const { return nx * ny; }
  Index node(Index ix, Index iy) const { return iy * (nx + 1) + ix; }
  Index cell(Index cx, Index cy) const { return cy * nx + cx; }
  double node_x(Index ix) const { return ix * hx; }
  double node_y(Index iy) const { return iy * hy; }
  bool on_boundary(Index ix, Index iy) const {
    return ix == 0 || ix == nx || iy == 0 || iy == ny;
  }

  /// One flag per node, true on the domain boundary.
  std::vector<bool> boundary_mask() const;
  /// Row-major list of interior node indices.
  std::vector<Index> interior_nodes() const;
};

FineGrid build_fine_grid(Index nx, Index ny);

/// Per-node restriction of a patch: global fine-node indices of the closure
/// of omega_i together with boundary classification masks.
struct PatchNodes {
  std::vector<Index> nodes;               // fine row-major within the patch
  std::vector<bool> on_patch_boundary;    // node lies on the boundary of omega_i
  std::vector<bool> on_domain_boundary;   // node lies on the boundary of omega_i intersected with the domain boundary
};

/// Structured coarse grid nested in a fine grid. Coarse nodes y_i are indexed
/// row-major like fine nodes; coarse elements K row-major over cells.
struct CoarseGrid {
  Index NX = 0, NY = 0;
  double H = 0;           // = 1/NX (x width; y width is 1/NY)
  Index rx = 0, ry = 0;   // fine cells per coarse cell, per axis
  FineGrid fine;

  Index num_nodes() const { return (NX + 1) * (NY + 1); }
  Index num_elements() const { return NX * NY; }
  Index node(Index iX, Index iY) const { return iY * (NX + 1) + iX; }
  Index element(Index eX, Index eY) const { return eY * NX + eX; }

  /// Coarse elements adjacent to coarse node i (the neighborhood omega_i).
  std::vector<Index> patch(Index i) const;
  /// Coarse node indices i with K contained in omega_i: the 4 vertices of K.
  std::vector<Index> elem_nbhd(Index K) const;
  /// Coarse elements of omega^K = union of omega_i over the vertices of K.
  std::vector<Index> elem_nbhd_elements(Index K) const;

  /// True if omega_i does not touch the domain boundary.
  bool is_floating(Index i) const;

  /// Fine nodes in closure(omega_i) in fine row-major order, with masks.
  PatchNodes patch_fine_nodes(Index i) const;
  /// Fine nodes strictly inside coarse element K, fine row-major order.
  std::vector<Index> element_interior_fine_nodes(Index K) const;
  /// Fine cells covered by coarse element K.
  std::vector<Index> element_fine_cells(Index K) const;
};

CoarseGrid build_coarse_grid(const FineGrid& fine, Index NX, Index NY);

}  // namespace gmsfem

#endif

#include "gmsfem/grid.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace gmsfem {

std::vector<bool> FineGrid::boundary_mask() const {
  std::vector<bool> mask(num_nodes(), false);
  for (Index iy = 0; iy <= ny; ++iy)
    for (Index ix = 0; ix <= nx; ++ix)
      if (on_boundary(ix, iy)) mask[node(ix, iy)] = true;
  return mask;
}

std::vector<Index> FineGrid::interior_nodes() const {
  std::vector<Index> out;
  out.reserve((nx - 1) * (ny - 1));
  for (Index iy = 1; iy < ny; ++iy)
    for (Index ix = 1; ix < nx; ++ix) out.push_back(node(ix, iy));
  return out;
}

FineGrid build_fine_grid(Index nx, Index ny) {
  if (nx < 2 || ny < 2)
    throw std::invalid_argument("build_fine_grid: need nx >= 2 and ny >= 2, got " +
                                std::to_string(nx) + "x" + std::to_string(ny));
  FineGrid g;
  g.nx = nx;
  g.ny = ny;
  g.hx = 1.0 / static_cast<double>(nx);
  g.hy = 1.0 / static_cast<double>(ny);
  return g;
}

CoarseGrid build_coarse_grid(const FineGrid& fine, Index NX, Index NY) {
  if (NX < 1 || NY < 1)
    throw std::invalid_argument("build_coarse_grid: coarse counts must be positive");
  if (fine.nx % NX != 0 || fine.ny % NY != 0)
    throw std::invalid_argument(
        "build_coarse_grid: fine grid " + std::to_string(fine.nx) + "x" +
        std::to_string(fine.ny) + " is not divisible by coarse grid " +
        std::to_string(NX) + "x" + std::to_string(NY));
  CoarseGrid c;
  c.NX = NX;
  c.NY = NY;
  c.H = 1.0 / static_cast<double>(NX);
  c.rx = fine.nx / NX;
  c.ry = fine.ny / NY;
  c.fine = fine;
  return c;
}

std::vector<Index> CoarseGrid::patch(Index i) const {
  const Index iX = i % (NX + 1), iY = i / (NX + 1);
  std::vector<Index> elems;
  for (Index eY : {iY - 1, iY})
    for (Index eX : {iX - 1, iX})
      if (eX >= 0 && eX < NX && eY >= 0 && eY < NY)
        elems.push_back(element(eX, eY));
  std::sort(elems.begin(), elems.end());
  return elems;
}

std::vector<Index> CoarseGrid::elem_nbhd(Index K) const {
  const Index eX = K % NX, eY = K / NX;
  return {node(eX, eY), node(eX + 1, eY), node(eX, eY + 1), node(eX + 1, eY + 1)};
}

std::vector<Index> CoarseGrid::elem_nbhd_elements(Index K) const {
  std::vector<Index> out;
  for (Index i : elem_nbhd(K))
    for (Index e : patch(i)) out.push_back(e);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool CoarseGrid::is_floating(Index i) const {
  // omega_i spans [iX-1, iX+1] x [iY-1, iY+1] coarse cells; it stays clear of
  // the domain boundary only one ring further in.
  const Index iX = i % (NX + 1), iY = i / (NX + 1);
  return iX > 1 && iX < NX - 1 && iY > 1 && iY < NY - 1;
}

PatchNodes CoarseGrid::patch_fine_nodes(Index i) const {
  const Index iX = i % (NX + 1), iY = i / (NX + 1);
  // Closure of omega_i in fine-node coordinates.
  const Index fx0 = std::max<Index>(iX - 1, 0) * rx;
  const Index fx1 = std::min<Index>(iX + 1, NX) * rx;
  const Index fy0 = std::max<Index>(iY - 1, 0) * ry;
  const Index fy1 = std::min<Index>(iY + 1, NY) * ry;
  PatchNodes p;
  for (Index iy = fy0; iy <= fy1; ++iy) {
    for (Index ix = fx0; ix <= fx1; ++ix) {
      p.nodes.push_back(fine.node(ix, iy));
      const bool on_patch = (ix == fx0 || ix == fx1 || iy == fy0 || iy == fy1);
      p.on_patch_boundary.push_back(on_patch);
      p.on_domain_boundary.push_back(on_patch && fine.on_boundary(ix, iy));
    }
  }
  return p;
}

std::vector<Index> CoarseGrid::element_interior_fine_nodes(Index K) const {
  const Index eX = K % NX, eY = K / NX;
  std::vector<Index> out;
  for (Index iy = eY * ry + 1; iy < (eY + 1) * ry; ++iy)
    for (Index ix = eX * rx + 1; ix < (eX + 1) * rx; ++ix)
      out.push_back(fine.node(ix, iy));
  return out;
}

std::vector<Index> CoarseGrid::element_fine_cells(Index K) const {
  const Index eX = K % NX, eY = K / NX;
  std::vector<Index> out;
  for (Index cy = eY * ry; cy < (eY + 1) * ry; ++cy)
    for (Index cx = eX * rx; cx < (eX + 1) * rx; ++cx)
      out.push_back(fine.cell(cx, cy));
  return out;
}

}  // namespace gmsfem

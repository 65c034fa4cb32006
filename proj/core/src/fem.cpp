#include "gmsfem/fem.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gmsfem {

Eigen::Matrix4d element_stiffness(double hx, double hy) {
  // Exact integrals of bilinear shape-function gradients on an hx-by-hy cell,
  // split into the d/dx and d/dy contributions.
  Eigen::Matrix4d Kx, Ky;
  Kx << 2, -2, -1, 1,
       -2, 2, 1, -1,
       -1, 1, 2, -2,
        1, -1, -2, 2;
  Ky << 2, 1, -1, -2,
        1, 2, -2, -1,
       -1, -2, 2, 1,
       -2, -1, 1, 2;
  return (hy / hx) * Kx / 6.0 + (hx / hy) * Ky / 6.0;
}

Eigen::Matrix4d element_mass(double hx, double hy) {
  Eigen::Matrix4d M;
  M << 4, 2, 1, 2,
       2, 4, 2, 1,
       1, 2, 4, 2,
       2, 1, 2, 4;
  return (hx * hy / 36.0) * M;
}

namespace {

void check_dims(const FineGrid& fine, const CoefficientField& kappa,
                const char* what) {
  if (fine.nx != kappa.nx || fine.ny != kappa.ny)
    throw std::invalid_argument(std::string(what) + ": coefficient is " +
                                std::to_string(kappa.nx) + "x" +
                                std::to_string(kappa.ny) + " but grid has " +
                                std::to_string(fine.nx) + "x" +
                                std::to_string(fine.ny) + " cells");
}

SpMat assemble_form(const FineGrid& fine, const CoefficientField& kappa,
                    const Eigen::Matrix4d& elem) {
  const Index n = fine.num_nodes();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(fine.num_cells()) * 16);
  for (Index cy = 0; cy < fine.ny; ++cy) {
    for (Index cx = 0; cx < fine.nx; ++cx) {
      const double k = kappa.value(cx, cy);
      const Index dof[4] = {fine.node(cx, cy), fine.node(cx + 1, cy),
                            fine.node(cx + 1, cy + 1), fine.node(cx, cy + 1)};
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          trips.emplace_back(dof[a], dof[b], k * elem(a, b));
    }
  }
  SpMat A(n, n);
  A.setFromTriplets(trips.begin(), trips.end());
  A.makeCompressed();
  return A;
}

SpMat assemble_form_on_cells(const FineGrid& fine, const CoefficientField& kappa,
                             const std::vector<Index>& cells,
                             const std::vector<Index>& idx,
                             const Eigen::Matrix4d& elem) {
  const Index n = fine.num_nodes();
  std::vector<Index> pos(n, -1);
  for (std::size_t k = 0; k < idx.size(); ++k) pos[idx[k]] = static_cast<Index>(k);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(cells.size() * 16);
  for (Index c : cells) {
    const Index cx = c % fine.nx, cy = c / fine.nx;
    const double k = kappa.value(cx, cy);
    const Index dof[4] = {fine.node(cx, cy), fine.node(cx + 1, cy),
                          fine.node(cx + 1, cy + 1), fine.node(cx, cy + 1)};
    for (int a = 0; a < 4; ++a) {
      if (pos[dof[a]] < 0) continue;
      for (int b = 0; b < 4; ++b) {
        if (pos[dof[b]] < 0) continue;
        trips.emplace_back(pos[dof[a]], pos[dof[b]], k * elem(a, b));
      }
    }
  }
  SpMat A(idx.size(), idx.size());
  A.setFromTriplets(trips.begin(), trips.end());
  A.makeCompressed();
  return A;
}

}  // namespace

SpMat assemble_stiffness(const FineGrid& fine, const CoefficientField& kappa) {
  check_dims(fine, kappa, "assemble_stiffness");
  return assemble_form(fine, kappa, element_stiffness(fine.hx, fine.hy));
}

SpMat assemble_weighted_mass(const FineGrid& fine, const CoefficientField& kappa) {
  check_dims(fine, kappa, "assemble_weighted_mass");
  return assemble_form(fine, kappa, element_mass(fine.hx, fine.hy));
}

SpMat assemble_stiffness_on_cells(const FineGrid& fine,
                                  const CoefficientField& kappa,
                                  const std::vector<Index>& cells,
                                  const std::vector<Index>& idx) {
  check_dims(fine, kappa, "assemble_stiffness_on_cells");
  return assemble_form_on_cells(fine, kappa, cells, idx,
                                element_stiffness(fine.hx, fine.hy));
}

SpMat assemble_weighted_mass_on_cells(const FineGrid& fine,
                                      const CoefficientField& kappa,
                                      const std::vector<Index>& cells,
                                      const std::vector<Index>& idx) {
  check_dims(fine, kappa, "assemble_weighted_mass_on_cells");
  return assemble_form_on_cells(fine, kappa, cells, idx,
                                element_mass(fine.hx, fine.hy));
}

Vec assemble_load(const FineGrid& fine, const ScalarField& f) {
  Vec b = Vec::Zero(fine.num_nodes());
  const double g = 0.5 / std::sqrt(3.0);
  const double qp[2] = {0.5 - g, 0.5 + g};  // 2-point Gauss on [0,1]
  for (Index cy = 0; cy < fine.ny; ++cy) {
    for (Index cx = 0; cx < fine.nx; ++cx) {
      const double x0 = cx * fine.hx, y0 = cy * fine.hy;
      const Index dof[4] = {fine.node(cx, cy), fine.node(cx + 1, cy),
                            fine.node(cx + 1, cy + 1), fine.node(cx, cy + 1)};
      double local[4] = {0, 0, 0, 0};
      for (double qx : qp) {
        for (double qy : qp) {
          const double fv = f(x0 + qx * fine.hx, y0 + qy * fine.hy);
          const double w = 0.25 * fine.hx * fine.hy * fv;
          local[0] += w * (1 - qx) * (1 - qy);
          local[1] += w * qx * (1 - qy);
          local[2] += w * qx * qy;
          local[3] += w * (1 - qx) * qy;
        }
      }
      for (int a = 0; a < 4; ++a) b[dof[a]] += local[a];
    }
  }
  return b;
}

Vec assemble_load(const FineGrid& fine, const std::vector<double>& cell_values) {
  if (static_cast<Index>(cell_values.size()) != fine.num_cells())
    throw std::invalid_argument("assemble_load: cell value count mismatch");
  Vec b = Vec::Zero(fine.num_nodes());
  const double w = 0.25 * fine.hx * fine.hy;
  for (Index cy = 0; cy < fine.ny; ++cy) {
    for (Index cx = 0; cx < fine.nx; ++cx) {
      const double fv = cell_values[static_cast<std::size_t>(fine.cell(cx, cy))];
      const Index dof[4] = {fine.node(cx, cy), fine.node(cx + 1, cy),
                            fine.node(cx + 1, cy + 1), fine.node(cx, cy + 1)};
      for (int a = 0; a < 4; ++a) b[dof[a]] += w * fv;
    }
  }
  return b;
}

Vec sample_nodal(const FineGrid& fine, const ScalarField& u) {
  Vec v(fine.num_nodes());
  for (Index iy = 0; iy <= fine.ny; ++iy)
    for (Index ix = 0; ix <= fine.nx; ++ix)
      v[fine.node(ix, iy)] = u(fine.node_x(ix), fine.node_y(iy));
  return v;
}

LinearSystem apply_homogeneous_dirichlet(const SpMat& A, const Vec& b,
                                         const std::vector<Index>& constrained) {
  const Index n = A.rows();
  if (static_cast<Index>(constrained.size()) >= n)
    throw std::invalid_argument("apply_homogeneous_dirichlet: empty system");
  std::vector<bool> fixed(n, false);
  for (Index i : constrained) {
    if (i < 0 || i >= n)
      throw std::invalid_argument("apply_homogeneous_dirichlet: index out of range");
    fixed[i] = true;
  }
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(A.nonZeros());
  for (int col = 0; col < A.outerSize(); ++col) {
    for (SpMat::InnerIterator it(A, col); it; ++it) {
      if (fixed[it.row()] || fixed[it.col()]) continue;
      trips.emplace_back(it.row(), it.col(), it.value());
    }
  }
  for (Index i : constrained) trips.emplace_back(i, i, 1.0);
  LinearSystem sys;
  sys.A.resize(n, n);
  sys.A.setFromTriplets(trips.begin(), trips.end());
  sys.A.makeCompressed();
  sys.b = b;
  for (Index i : constrained) sys.b[i] = 0.0;
  sys.constrained = constrained;
  std::sort(sys.constrained.begin(), sys.constrained.end());
  return sys;
}

Vec solve_spd(const SpMat& A, const Vec& b, double rel_tol) {
  Eigen::SimplicialLDLT<SpMat> ldlt(A);
  if (ldlt.info() != Eigen::Success)
    throw std::runtime_error("solve_spd: factorization failed (matrix not SPD?)");
  if ((ldlt.vectorD().array() <= 0).any())
    throw std::runtime_error("solve_spd: non-positive pivot, matrix not SPD");
  Vec x = ldlt.solve(b);
  const double bnorm = b.norm();
  if (bnorm == 0.0) return Vec::Zero(A.rows());
  // Iterative refinement until the residual contract holds.
  for (int it = 0; it < 5; ++it) {
    Vec r = b - A * x;
    if (r.norm() <= rel_tol * bnorm) return x;
    x += ldlt.solve(r);
  }
  Vec r = b - A * x;
  if (r.norm() <= rel_tol * bnorm) return x;
  throw std::runtime_error("solve_spd: residual " + std::to_string(r.norm() / bnorm) +
                           " above tolerance after refinement");
}

Vec solve_spd(const LinearSystem& system, double rel_tol) {
  return solve_spd(system.A, system.b, rel_tol);
}

SpMat restrict_mat(const SpMat& A, const std::vector<Index>& idx) {
  const Index n = A.rows();
  std::vector<Index> pos(n, -1);
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (idx[k] < 0 || idx[k] >= n)
      throw std::invalid_argument("restrict_mat: index out of range");
    if (k > 0 && idx[k] <= idx[k - 1])
      throw std::invalid_argument("restrict_mat: indices must be sorted ascending");
    pos[idx[k]] = static_cast<Index>(k);
  }
  std::vector<Eigen::Triplet<double>> trips;
  for (Index j : idx) {
    for (SpMat::InnerIterator it(A, j); it; ++it) {
      const Index r = pos[it.row()];
      if (r >= 0) trips.emplace_back(r, pos[j], it.value());
    }
  }
  SpMat out(idx.size(), idx.size());
  out.setFromTriplets(trips.begin(), trips.end());
  out.makeCompressed();
  return out;
}

Vec restrict_vec(const Vec& v, const std::vector<Index>& idx) {
  Vec out(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) out[k] = v[idx[k]];
  return out;
}

Vec extend_by_zero(const Vec& local, const std::vector<Index>& idx, Index n) {
  Vec out = Vec::Zero(n);
  for (std::size_t k = 0; k < idx.size(); ++k) out[idx[k]] = local[k];
  return out;
}

double quad_form(const SpMat& A, const Vec& v) {
  if (A.rows() != v.size())
    throw std::invalid_argument("quad_form: dimension mismatch");
  return v.dot(A * v);
}

}  // namespace gmsfem

#ifndef GMSFEM_FEM_HPP
#define GMSFEM_FEM_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <vector>

#include "gmsfem/coefficient.hpp"
#include "gmsfem/grid.hpp"

namespace gmsfem {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;
using ScalarField = std::function<double(double, double)>;

/// SPD system after symmetric elimination of homogeneous Dirichlet DOFs.
/// Constrained rows/columns are identity rows; rhs entries there are 0.
struct LinearSystem {
  SpMat A;
  Vec b;
  std::vector<Index> constrained;  // sorted
};

/// 4x4 element matrices in local corner order (SW, SE, NE, NW).
Eigen::Matrix4d element_stiffness(double hx, double hy);
Eigen::Matrix4d element_mass(double hx, double hy);

/// A = sum over cells of kappa_cell * K_e. Exact for piecewise-constant kappa.
SpMat assemble_stiffness(const FineGrid& fine, const CoefficientField& kappa);

/// M = sum over cells of kappa_cell * M_e (kappa-weighted mass).
SpMat assemble_weighted_mass(const FineGrid& fine, const CoefficientField& kappa);

/// Assembly over a subset of fine cells, on the node set idx (sorted). Cell
/// corners outside idx are dropped. This is the local Neumann form of a
/// subdomain when idx covers its closure and cells cover the subdomain.
SpMat assemble_stiffness_on_cells(const FineGrid& fine,
                                  const CoefficientField& kappa,
                                  const std::vector<Index>& cells,
                                  const std::vector<Index>& idx);
SpMat assemble_weighted_mass_on_cells(const FineGrid& fine,
                                      const CoefficientField& kappa,
                                      const std::vector<Index>& cells,
                                      const std::vector<Index>& idx);

/// Load vector by per-cell 2x2 Gauss quadrature of f * shape function.
Vec assemble_load(const FineGrid& fine, const ScalarField& f);
/// Cellwise-constant source variant (exact).
Vec assemble_load(const FineGrid& fine, const std::vector<double>& cell_values);

/// Nodal samples of an analytic function.
Vec sample_nodal(const FineGrid& fine, const ScalarField& u);

LinearSystem apply_homogeneous_dirichlet(const SpMat& A, const Vec& b,
                                         const std::vector<Index>& constrained);

/// Direct sparse SPD solve with residual certification:
/// ||b - A u||_2 <= rel_tol * ||b||_2, deterministic.
Vec solve_spd(const LinearSystem& system, double rel_tol = 1e-12);
Vec solve_spd(const SpMat& A, const Vec& b, double rel_tol = 1e-12);

/// Principal submatrix in the induced order; indices must be sorted.
SpMat restrict_mat(const SpMat& A, const std::vector<Index>& idx);
Vec restrict_vec(const Vec& v, const std::vector<Index>& idx);
/// Scatter local values back into a length-n zero vector.
Vec extend_by_zero(const Vec& local, const std::vector<Index>& idx, Index n);

/// v' A v (energy for stiffness, weighted L2 for mass).
double quad_form(const SpMat& A, const Vec& v);

}  // namespace gmsfem

#endif

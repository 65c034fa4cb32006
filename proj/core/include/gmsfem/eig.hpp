#ifndef GMSFEM_EIG_HPP
#define GMSFEM_EIG_HPP

#include <string>

#include "gmsfem/fem.hpp"

namespace gmsfem {

/// Smallest eigenpairs of A v = lambda M v with M SPD, m-orthonormalized.
struct EigenPairSet {
  std::string region;       // "global", "K<j>", "omega<i>", ...
  Vec values;               // ascending
  Eigen::MatrixXd vectors;  // columns, vi' M vj = delta_ij
  SpMat M;                  // the inner-product matrix used to orthonormalize

  Index count() const { return values.size(); }

  /// Worst relative eigen-residual ||A v - l M v|| / (||A v|| + |l| ||M v||).
  double max_residual(const SpMat& A) const;
  /// max |V' M V - I|.
  double max_ortho_defect() const;
};

struct EigOptions {
  Index dense_cap = 4096;       // dimension limit for full_dense_eig
  Index iterative_threshold = 256;  // partial solves go iterative above this
  double residual_tol = 1e-8;   // relative eigen-residual contract
  double ortho_tol = 1e-10;     // m-orthonormality contract
  int max_iterations = 500;
  unsigned seed = 12345;        // subspace iteration start block
};

/// The `count` algebraically smallest pairs. Deterministic; each vector's
/// largest-magnitude entry is made positive, degenerate pairs are ordered
/// lexicographically.
EigenPairSet generalized_sym_eig(const SpMat& A, const SpMat& M, Index count,
                                 const EigOptions& opts = {},
                                 const std::string& region = "global");

/// Complete spectrum, dense; dimension must be within opts.dense_cap.
EigenPairSet full_dense_eig(const SpMat& A, const SpMat& M,
                            const EigOptions& opts = {},
                            const std::string& region = "global");

}  // namespace gmsfem

#endif

#ifndef GMSFEM_SPACE_HPP
#define GMSFEM_SPACE_HPP

#include <string>
#include <vector>

#include "gmsfem/eig.hpp"
#include "gmsfem/fem.hpp"
#include "gmsfem/grid.hpp"

namespace gmsfem {

/// Bilinear coarse hats chi_i sampled at fine nodes, stored on the closure of
/// omega_i. Sum to 1 at every fine node; gradients bounded by 1/H.
struct PartitionOfUnity {
  struct Hat {
    std::vector<Index> nodes;  // fine nodes of closure(omega_i), ascending
    Vec values;
  };
  std::vector<Hat> hats;  // one per coarse node

  Vec full_vector(Index i, Index n) const {
    return extend_by_zero(hats[i].values, hats[i].nodes, n);
  }
};

PartitionOfUnity build_partition_of_unity(const FineGrid& fine,
                                          const CoarseGrid& coarse);

/// Eigenpairs of one local problem together with the fine DOFs they live on.
struct LocalBasis {
  std::vector<Index> global_idx;  // free DOFs of the local problem, ascending
  EigenPairSet pairs;
};

/// Neumann eigenproblem on closure(omega_i): the pencil is assembled over the
/// cells of omega_i only (so the interface condition on the interior part of
/// the patch boundary is natural), with the DOFs on the domain boundary
/// eliminated.
LocalBasis neumann_patch_basis(const CoarseGrid& coarse, Index i,
                               const CoefficientField& kappa, Index count,
                               const EigOptions& opts = {});

/// Dirichlet eigenproblem on coarse element K: pencil restricted to the fine
/// nodes strictly inside K.
LocalBasis dirichlet_element_basis(const CoarseGrid& coarse, Index K,
                                   const SpMat& A, const SpMat& M, Index count,
                                   const EigOptions& opts = {});

/// All local spectral bases of one configuration.
struct LocalSpectralBasis {
  std::vector<LocalBasis> neumann;    // per coarse node
  std::vector<LocalBasis> dirichlet;  // per coarse element
};

LocalSpectralBasis build_local_bases(const CoarseGrid& coarse,
                                     const CoefficientField& kappa,
                                     const SpMat& A, const SpMat& M,
                                     Index neumann_count, Index dirichlet_count,
                                     const EigOptions& opts = {});

/// Hat values aligned with an ascending fine-node index list (0 off support).
std::vector<double> hat_values_at(const PartitionOfUnity::Hat& hat,
                                  const std::vector<Index>& idx);

/// Row r of R is one coarse basis function on the fine grid: first all
/// Phi_{i,l} = chi_i * psi_l, then all Dirichlet eigenvectors zero-extended.
struct CoarseSpace {
  enum class Kind { Neumann, Dirichlet };
  struct RowInfo {
    Kind kind;
    Index region;  // coarse node or element index
    Index ell;     // 1-based eigenpair number
  };
  SpMat R;  // rows x fine nodes
  std::vector<RowInfo> rows;
};

CoarseSpace assemble_coarse_space(const PartitionOfUnity& pou,
                                  const LocalSpectralBasis& bases,
                                  const std::vector<Index>& L_node,
                                  const std::vector<Index>& L_elem, Index n_fine);

struct CoarseSolution {
  Vec u_H;            // fine-grid representation
  Vec coefficients;   // one per coarse row
  Index retained_rank = 0;
};

/// Galerkin solve in span(R): A_c = R A R', near-dependent directions dropped
/// spectrally below drop_tol relative.
CoarseSolution coarse_galerkin_solve(const CoarseSpace& space, const SpMat& A,
                                     const Vec& b, double drop_tol = 1e-10);

/// Smallest left-out Neumann and Dirichlet eigenvalues for kept counts.
struct LeftOut {
  double lambda_next = 0;  // min over coarse nodes of value L_i+1
  double mu_next = 0;      // min over elements of value L_K+1
};

LeftOut min_left_out(const LocalSpectralBasis& bases,
                     const std::vector<Index>& L_node,
                     const std::vector<Index>& L_elem);

}  // namespace gmsfem

#endif

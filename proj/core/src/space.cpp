#include "gmsfem/space.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gmsfem {

PartitionOfUnity build_partition_of_unity(const FineGrid& fine,
                                          const CoarseGrid& coarse) {
  PartitionOfUnity pou;
  pou.hats.resize(coarse.num_nodes());
  const double Hx = 1.0 / coarse.NX, Hy = 1.0 / coarse.NY;
  for (Index i = 0; i < coarse.num_nodes(); ++i) {
    const Index iX = i % (coarse.NX + 1), iY = i / (coarse.NX + 1);
    const double cx = iX * Hx, cy = iY * Hy;
    PatchNodes p = coarse.patch_fine_nodes(i);
    PartitionOfUnity::Hat hat;
    hat.nodes = p.nodes;
    hat.values.resize(p.nodes.size());
    for (std::size_t k = 0; k < p.nodes.size(); ++k) {
      const Index ix = p.nodes[k] % (fine.nx + 1), iy = p.nodes[k] / (fine.nx + 1);
      const double tx = 1.0 - std::abs(fine.node_x(ix) - cx) / Hx;
      const double ty = 1.0 - std::abs(fine.node_y(iy) - cy) / Hy;
      hat.values[k] = std::max(0.0, tx) * std::max(0.0, ty);
    }
    pou.hats[i] = std::move(hat);
  }
  return pou;
}

LocalBasis neumann_patch_basis(const CoarseGrid& coarse, Index i,
                               const CoefficientField& kappa, Index count,
                               const EigOptions& opts) {
  PatchNodes p = coarse.patch_fine_nodes(i);
  LocalBasis basis;
  for (std::size_t k = 0; k < p.nodes.size(); ++k)
    if (!p.on_domain_boundary[k]) basis.global_idx.push_back(p.nodes[k]);
  std::vector<Index> cells;
  for (Index e : coarse.patch(i))
    for (Index c : coarse.element_fine_cells(e)) cells.push_back(c);
  const SpMat Ap =
      assemble_stiffness_on_cells(coarse.fine, kappa, cells, basis.global_idx);
  const SpMat Mp =
      assemble_weighted_mass_on_cells(coarse.fine, kappa, cells, basis.global_idx);
  basis.pairs =
      generalized_sym_eig(Ap, Mp, count, opts, "omega" + std::to_string(i));
  return basis;
}

LocalBasis dirichlet_element_basis(const CoarseGrid& coarse, Index K,
                                   const SpMat& A, const SpMat& M, Index count,
                                   const EigOptions& opts) {
  LocalBasis basis;
  basis.global_idx = coarse.element_interior_fine_nodes(K);
  if (basis.global_idx.empty())
    throw std::invalid_argument("dirichlet_element_basis: element " +
                                std::to_string(K) + " has no interior fine nodes");
  const SpMat Ak = restrict_mat(A, basis.global_idx);
  const SpMat Mk = restrict_mat(M, basis.global_idx);
  basis.pairs = generalized_sym_eig(Ak, Mk, count, opts, "K" + std::to_string(K));
  return basis;
}

LocalSpectralBasis build_local_bases(const CoarseGrid& coarse,
                                     const CoefficientField& kappa,
                                     const SpMat& A, const SpMat& M,
                                     Index neumann_count, Index dirichlet_count,
                                     const EigOptions& opts) {
  LocalSpectralBasis out;
  out.neumann.reserve(coarse.num_nodes());
  for (Index i = 0; i < coarse.num_nodes(); ++i)
    out.neumann.push_back(
        neumann_patch_basis(coarse, i, kappa, neumann_count, opts));
  out.dirichlet.reserve(coarse.num_elements());
  for (Index K = 0; K < coarse.num_elements(); ++K)
    out.dirichlet.push_back(
        dirichlet_element_basis(coarse, K, A, M, dirichlet_count, opts));
  return out;
}

std::vector<double> hat_values_at(const PartitionOfUnity::Hat& hat,
                                  const std::vector<Index>& idx) {
  std::vector<double> chi(idx.size(), 0.0);
  std::size_t a = 0;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    while (a < hat.nodes.size() && hat.nodes[a] < idx[k]) ++a;
    if (a < hat.nodes.size() && hat.nodes[a] == idx[k]) chi[k] = hat.values[a];
  }
  return chi;
}

CoarseSpace assemble_coarse_space(const PartitionOfUnity& pou,
                                  const LocalSpectralBasis& bases,
                                  const std::vector<Index>& L_node,
                                  const std::vector<Index>& L_elem, Index n_fine) {
  if (L_node.size() != bases.neumann.size() || L_elem.size() != bases.dirichlet.size())
    throw std::invalid_argument("assemble_coarse_space: kept-count size mismatch");
  std::vector<Eigen::Triplet<double>> trips;
  CoarseSpace space;
  Index row = 0;

  for (std::size_t i = 0; i < bases.neumann.size(); ++i) {
    const LocalBasis& nb = bases.neumann[i];
    if (L_node[i] > nb.pairs.count())
      throw std::invalid_argument("assemble_coarse_space: kept count " +
                                  std::to_string(L_node[i]) +
                                  " exceeds computed pairs on omega" +
                                  std::to_string(i));
    const std::vector<double> chi = hat_values_at(pou.hats[i], nb.global_idx);
    for (Index l = 0; l < L_node[i]; ++l) {
      for (std::size_t k = 0; k < nb.global_idx.size(); ++k) {
        const double v = chi[k] * nb.pairs.vectors(k, l);
        if (v != 0.0) trips.emplace_back(row, nb.global_idx[k], v);
      }
      space.rows.push_back({CoarseSpace::Kind::Neumann, static_cast<Index>(i), l + 1});
      ++row;
    }
  }

  for (std::size_t K = 0; K < bases.dirichlet.size(); ++K) {
    const LocalBasis& db = bases.dirichlet[K];
    if (L_elem[K] > db.pairs.count())
      throw std::invalid_argument("assemble_coarse_space: kept count " +
                                  std::to_string(L_elem[K]) +
                                  " exceeds computed pairs on K" + std::to_string(K));
    for (Index l = 0; l < L_elem[K]; ++l) {
      for (std::size_t k = 0; k < db.global_idx.size(); ++k) {
        const double v = db.pairs.vectors(k, l);
        if (v != 0.0) trips.emplace_back(row, db.global_idx[k], v);
      }
      space.rows.push_back(
          {CoarseSpace::Kind::Dirichlet, static_cast<Index>(K), l + 1});
      ++row;
    }
  }

  space.R.resize(row, n_fine);
  space.R.setFromTriplets(trips.begin(), trips.end());
  space.R.makeCompressed();
  return space;
}

CoarseSolution coarse_galerkin_solve(const CoarseSpace& space, const SpMat& A,
                                     const Vec& b, double drop_tol) {
  const Index m = space.R.rows();
  if (m == 0)
    throw std::invalid_argument("coarse_galerkin_solve: empty coarse space");
  const SpMat RA = space.R * A;
  Eigen::MatrixXd Ac = Eigen::MatrixXd(RA * space.R.transpose());
  Ac = 0.5 * (Ac + Ac.transpose());
  Vec bc = space.R * b;

  // Jacobi scaling: the rows' energy norms span orders of magnitude, and
  // equilibrating the diagonal keeps the spectral cutoff from discarding
  // directions that are merely badly scaled.
  Vec d(m);
  for (Index k = 0; k < m; ++k)
    d[k] = Ac(k, k) > 0 ? 1.0 / std::sqrt(Ac(k, k)) : 1.0;
  Ac = d.asDiagonal() * Ac * d.asDiagonal();
  bc = bc.cwiseProduct(d);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Ac);
  const double emax = es.eigenvalues().cwiseAbs().maxCoeff();
  if (!(emax > 0))
    throw std::runtime_error("coarse_galerkin_solve: coarse operator is zero");

  CoarseSolution sol;
  Vec c = Vec::Zero(m);
  for (Index k = 0; k < m; ++k) {
    const double ev = es.eigenvalues()[k];
    if (ev > drop_tol * emax) {
      const Vec q = es.eigenvectors().col(k);
      c += (q.dot(bc) / ev) * q;
      ++sol.retained_rank;
    }
  }
  sol.coefficients = c.cwiseProduct(d);
  sol.u_H = space.R.transpose() * sol.coefficients;
  return sol;
}

LeftOut min_left_out(const LocalSpectralBasis& bases,
                     const std::vector<Index>& L_node,
                     const std::vector<Index>& L_elem) {
  LeftOut out;
  out.lambda_next = std::numeric_limits<double>::infinity();
  out.mu_next = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < bases.neumann.size(); ++i) {
    if (L_node[i] >= bases.neumann[i].pairs.count())
      throw std::invalid_argument(
          "min_left_out: no spare Neumann pair on omega" + std::to_string(i) +
          "; compute at least L+1 pairs");
    out.lambda_next = std::min(out.lambda_next, bases.neumann[i].pairs.values[L_node[i]]);
  }
  for (std::size_t K = 0; K < bases.dirichlet.size(); ++K) {
    if (L_elem[K] >= bases.dirichlet[K].pairs.count())
      throw std::invalid_argument(
          "min_left_out: no spare Dirichlet pair on K" + std::to_string(K) +
          "; compute at least L+1 pairs");
    out.mu_next = std::min(out.mu_next, bases.dirichlet[K].pairs.values[L_elem[K]]);
  }
  return out;
}

}  // namespace gmsfem

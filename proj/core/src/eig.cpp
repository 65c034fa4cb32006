#include "gmsfem/eig.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace gmsfem {

namespace {

// Max absolute column sum; a cheap matrix-norm scale for residual tests that
// stays meaningful when an eigenvalue (and hence A v) is zero.
double one_norm(const SpMat& A) {
  double best = 0.0;
  for (Index j = 0; j < A.outerSize(); ++j) {
    double col = 0.0;
    for (SpMat::InnerIterator it(A, j); it; ++it) col += std::abs(it.value());
    best = std::max(best, col);
  }
  return best;
}

}  // namespace

double EigenPairSet::max_residual(const SpMat& A) const {
  const double nA = one_norm(A), nM = one_norm(M);
  double worst = 0.0;
  for (Index i = 0; i < count(); ++i) {
    const Vec v = vectors.col(i);
    const double denom = (nA + std::abs(values[i]) * nM) * v.norm();
    if (denom == 0.0) continue;
    worst = std::max(worst, (A * v - values[i] * (M * v)).norm() / denom);
  }
  return worst;
}

double EigenPairSet::max_ortho_defect() const {
  const Eigen::MatrixXd G = vectors.transpose() * (M * vectors);
  return (G - Eigen::MatrixXd::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff();
}

namespace {

// Sign rule: largest-magnitude entry positive (lowest index on ties).
void fix_signs(Eigen::MatrixXd& V) {
  for (Index j = 0; j < V.cols(); ++j) {
    Index arg = 0;
    double best = 0.0;
    for (Index i = 0; i < V.rows(); ++i) {
      const double a = std::abs(V(i, j));
      if (a > best) {
        best = a;
        arg = i;
      }
    }
    if (V(arg, j) < 0) V.col(j) = -V.col(j);
  }
}

bool lex_less(const Eigen::MatrixXd& V, Index a, Index b) {
  for (Index i = 0; i < V.rows(); ++i) {
    if (V(i, a) < V(i, b)) return true;
    if (V(i, a) > V(i, b)) return false;
  }
  return false;
}

// Reproducible ordering inside degenerate clusters.
void order_degenerate(Vec& values, Eigen::MatrixXd& V) {
  const double scale = std::max(1.0, values.cwiseAbs().maxCoeff());
  Index lo = 0;
  while (lo < values.size()) {
    Index hi = lo + 1;
    while (hi < values.size() && values[hi] - values[lo] <= 1e-12 * scale) ++hi;
    if (hi - lo > 1) {
      std::vector<Index> ord(hi - lo);
      std::iota(ord.begin(), ord.end(), lo);
      std::sort(ord.begin(), ord.end(),
                [&](Index a, Index b) { return lex_less(V, a, b); });
      Eigen::MatrixXd block(V.rows(), hi - lo);
      Vec vals(hi - lo);
      for (Index k = 0; k < hi - lo; ++k) {
        block.col(k) = V.col(ord[k]);
        vals[k] = values[ord[k]];
      }
      V.middleCols(lo, hi - lo) = block;
      values.segment(lo, hi - lo) = vals;
    }
    lo = hi;
  }
}

EigenPairSet finalize(const std::string& region, const SpMat& M, Vec values,
                      Eigen::MatrixXd V) {
  fix_signs(V);
  order_degenerate(values, V);
  EigenPairSet set;
  set.region = region;
  set.values = std::move(values);
  set.vectors = std::move(V);
  set.M = M;
  return set;
}

EigenPairSet dense_path(const SpMat& A, const SpMat& M, Index count,
                        const std::string& region) {
  const Eigen::MatrixXd Ad(A), Md(M);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Ad, Md);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("generalized_sym_eig[" + region +
                             "]: dense solver failed (M not SPD?)");
  return finalize(region, M, es.eigenvalues().head(count),
                  es.eigenvectors().leftCols(count));
}

// Shift-invert block iteration with Rayleigh-Ritz extraction.
EigenPairSet iterative_path(const SpMat& A, const SpMat& M, Index count,
                            const EigOptions& opts, const std::string& region) {
  const Index n = A.rows();
  double trA = 0.0, trM = 0.0;
  for (Index i = 0; i < n; ++i) {
    trA += A.coeff(i, i);
    trM += M.coeff(i, i);
  }
  const double shift = std::max(1e-3 * trA / trM, 1e-30);
  SpMat K = A + shift * M;
  Eigen::SimplicialLDLT<SpMat> ldlt(K);
  if (ldlt.info() != Eigen::Success || (ldlt.vectorD().array() <= 0).any())
    throw std::runtime_error("generalized_sym_eig[" + region +
                             "]: shifted operator not SPD (M not PD?)");

  const double nA = one_norm(A), nM = one_norm(M);
  const Index p = std::min<Index>(n, count + std::max<Index>(8, count / 2));
  std::mt19937 rng(opts.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd X(n, p);
  for (Index j = 0; j < p; ++j)
    for (Index i = 0; i < n; ++i) X(i, j) = gauss(rng);

  Vec ritz;
  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    Eigen::MatrixXd Y = ldlt.solve(M * X);
    // Rayleigh-Ritz on the iterated block.
    Eigen::MatrixXd Ap = Y.transpose() * (A * Y);
    Eigen::MatrixXd Mp = Y.transpose() * (M * Y);
    Ap = 0.5 * (Ap + Ap.transpose());
    Mp = 0.5 * (Mp + Mp.transpose());
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Ap, Mp);
    if (es.info() != Eigen::Success)
      throw std::runtime_error("generalized_sym_eig[" + region +
                               "]: Rayleigh-Ritz breakdown");
    X = Y * es.eigenvectors();
    ritz = es.eigenvalues();

    bool converged = true;
    for (Index i = 0; i < count && converged; ++i) {
      const Vec v = X.col(i);
      const double denom = (nA + std::abs(ritz[i]) * nM) * v.norm();
      if (denom > 0 &&
          (A * v - ritz[i] * (M * v)).norm() > 0.5 * opts.residual_tol * denom)
        converged = false;
    }
    if (converged)
      return finalize(region, M, ritz.head(count), X.leftCols(count));
  }
  throw std::runtime_error("generalized_sym_eig[" + region +
                           "]: no convergence after " +
                           std::to_string(opts.max_iterations) + " iterations");
}

}  // namespace

EigenPairSet generalized_sym_eig(const SpMat& A, const SpMat& M, Index count,
                                 const EigOptions& opts,
                                 const std::string& region) {
  if (A.rows() != A.cols() || M.rows() != M.cols() || A.rows() != M.rows())
    throw std::invalid_argument("generalized_sym_eig: dimension mismatch");
  if (count < 1 || count > A.rows())
    throw std::invalid_argument("generalized_sym_eig[" + region + "]: count " +
                                std::to_string(count) + " out of range for n=" +
                                std::to_string(A.rows()));
  // Dense for small problems or when most of the spectrum is wanted anyway.
  if (A.rows() <= opts.iterative_threshold || count > A.rows() / 2)
    return dense_path(A, M, count, region);
  return iterative_path(A, M, count, opts, region);
}

EigenPairSet full_dense_eig(const SpMat& A, const SpMat& M, const EigOptions& opts,
                            const std::string& region) {
  if (A.rows() > opts.dense_cap)
    throw std::invalid_argument("full_dense_eig[" + region + "]: dimension " +
                                std::to_string(A.rows()) + " exceeds cap " +
                                std::to_string(opts.dense_cap));
  return dense_path(A, M, A.rows(), region);
}

}  // namespace gmsfem

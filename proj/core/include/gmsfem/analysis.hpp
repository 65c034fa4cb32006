#ifndef GMSFEM_ANALYSIS_HPP
#define GMSFEM_ANALYSIS_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "gmsfem/eig.hpp"
#include "gmsfem/space.hpp"

namespace gmsfem {

/// Eigenpair expansion of one region, used to evaluate the spectral-decay
/// norms |||v|||_s = sqrt(sum lambda_l^s m(v, phi_l)^2). The norms are exact
/// only when the spectrum is complete for the region's DOF set.
struct SpectralNormContext {
  EigenPairSet pairs;
  bool complete() const { return pairs.count() == pairs.vectors.rows(); }
};

SpectralNormContext make_context(EigenPairSet pairs);

/// m-coefficients of v in the context's eigenbasis.
Vec spectral_coefficients(const SpectralNormContext& ctx, const Vec& v);

double triple_norm(const SpectralNormContext& ctx, const Vec& v, double s);

/// The operator v -> sum lambda_l m(v, phi_l) phi_l; requires a complete
/// spectrum since the identity |||Av|||_0 = |||v|||_2 would otherwise fail
/// silently.
Vec apply_A(const SpectralNormContext& ctx, const Vec& v);

/// m-orthogonal projection onto the first L pairs.
Vec truncate_project(const SpectralNormContext& ctx, const Vec& v, Index L);

/// One row of a verification report.
struct CheckRow {
  std::string name;
  double lhs = 0, rhs = 0, slack = 0;
  bool pass = false;
};

/// |||u|||_2^2 computed spectrally must match m(g, g) for g = M^{-1} b,
/// where u solves the eliminated system A u = b.
CheckRow check_div_identity(const SpectralNormContext& ctx, const SpMat& A,
                            const Vec& b, const std::string& tag = "");

/// m(v - J_L v, v - J_L v) <= a(v - J_L v, v - J_L v)/mu_{L+1} <= a(v,v)/mu_{L+1}.
std::vector<CheckRow> check_truncation_inequality(const SpectralNormContext& ctx,
                                                  const SpMat& A, const Vec& v,
                                                  Index L,
                                                  const std::string& tag = "");

/// I_N v = sum_i chi_i * (projection of v onto the first L_i Neumann pairs).
Vec interpolate_IN(const PartitionOfUnity& pou, const LocalSpectralBasis& bases,
                   const std::vector<Index>& L_node, const Vec& v, Index n);

/// J_D v = per-element projection onto Dirichlet pairs, zero-extended.
Vec interpolate_JD(const LocalSpectralBasis& bases,
                   const std::vector<Index>& L_elem, const Vec& v, Index n);

/// I_0 = I_N v_N + J_D v_D; the splitting (v_N, v_D) is supplied by the caller.
Vec interpolate_I0(const PartitionOfUnity& pou, const LocalSpectralBasis& bases,
                   const std::vector<Index>& L_node,
                   const std::vector<Index>& L_elem, const Vec& v_N,
                   const Vec& v_D, Index n);

struct ErrorReport {
  double energy = 0, l2 = 0, rel_energy = 0, rel_l2 = 0;
};

ErrorReport error_report(const Vec& u_ref, const Vec& u_H, const SpMat& A,
                         const SpMat& M);

/// Identity/inequality suite at tiny scale (complete spectra), used by the
/// `verify` CLI subcommand. Deterministic for a fixed seed.
std::vector<CheckRow> run_verification_suite(Index n_fine = 8, Index n_coarse = 4,
                                             unsigned seed = 20240817);

/// CSV rows: check,lhs,rhs,slack,pass
void write_checks_csv(std::ostream& out, const std::vector<CheckRow>& rows);

}  // namespace gmsfem

#endif

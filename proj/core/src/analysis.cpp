#include "gmsfem/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <stdexcept>

namespace gmsfem {

SpectralNormContext make_context(EigenPairSet pairs) {
  SpectralNormContext ctx;
  ctx.pairs = std::move(pairs);
  return ctx;
}

Vec spectral_coefficients(const SpectralNormContext& ctx, const Vec& v) {
  if (v.size() != ctx.pairs.vectors.rows())
    throw std::invalid_argument("spectral_coefficients: dimension mismatch");
  return ctx.pairs.vectors.transpose() * (ctx.pairs.M * v);
}

double triple_norm(const SpectralNormContext& ctx, const Vec& v, double s) {
  const Vec c = spectral_coefficients(ctx, v);
  double sum = 0.0;
  for (Index l = 0; l < ctx.pairs.count(); ++l) {
    const double lam = ctx.pairs.values[l];
    const double w = (s == 0.0) ? 1.0 : std::pow(lam, s);
    if (lam == 0.0 && s != 0.0) continue;  // zero mode contributes nothing
    sum += w * c[l] * c[l];
  }
  return std::sqrt(std::max(0.0, sum));
}

Vec apply_A(const SpectralNormContext& ctx, const Vec& v) {
  if (!ctx.complete())
    throw std::invalid_argument(
        "apply_A: complete spectrum required (have " +
        std::to_string(ctx.pairs.count()) + " of " +
        std::to_string(ctx.pairs.vectors.rows()) + " pairs)");
  const Vec c = spectral_coefficients(ctx, v);
  return ctx.pairs.vectors * ctx.pairs.values.cwiseProduct(c);
}

Vec truncate_project(const SpectralNormContext& ctx, const Vec& v, Index L) {
  if (L < 0 || L > ctx.pairs.count())
    throw std::invalid_argument("truncate_project: L out of range");
  if (L == 0) return Vec::Zero(v.size());
  const Vec c = spectral_coefficients(ctx, v);
  return ctx.pairs.vectors.leftCols(L) * c.head(L);
}

namespace {

CheckRow equality_row(std::string name, double lhs, double rhs, double rel_tol) {
  CheckRow row;
  row.name = std::move(name);
  row.lhs = lhs;
  row.rhs = rhs;
  const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
  row.slack = std::abs(lhs - rhs) / scale;
  row.pass = row.slack <= rel_tol;
  return row;
}

CheckRow inequality_row(std::string name, double lhs, double rhs) {
  CheckRow row;
  row.name = std::move(name);
  row.lhs = lhs;
  row.rhs = rhs;
  row.slack = rhs - lhs;
  row.pass = lhs <= rhs + 1e-10 * std::max(1.0, std::abs(rhs));
  return row;
}

}  // namespace

CheckRow check_div_identity(const SpectralNormContext& ctx, const SpMat& A,
                            const Vec& b, const std::string& tag) {
  if (!ctx.complete())
    throw std::invalid_argument("check_div_identity: complete spectrum required");
  const Vec u = solve_spd(A, b, 1e-13);
  const double lhs = std::pow(triple_norm(ctx, u, 2.0), 2);
  const Vec g = solve_spd(ctx.pairs.M, b, 1e-13);  // discrete kappa^{-1} f
  const double rhs = g.dot(ctx.pairs.M * g);
  return equality_row("div_identity" + tag, lhs, rhs, 1e-8);
}

std::vector<CheckRow> check_truncation_inequality(const SpectralNormContext& ctx,
                                                  const SpMat& A, const Vec& v,
                                                  Index L,
                                                  const std::string& tag) {
  if (L + 1 > ctx.pairs.count())
    throw std::invalid_argument("check_truncation_inequality: need L+1 pairs");
  const double mu_next = ctx.pairs.values[L];
  const Vec r = v - truncate_project(ctx, v, L);
  const double m_rr = r.dot(ctx.pairs.M * r);
  const double a_rr = r.dot(A * r);
  const double a_vv = v.dot(A * v);
  return {inequality_row("truncation_m_vs_a" + tag, m_rr, a_rr / mu_next),
          inequality_row("truncation_a_monotone" + tag, a_rr / mu_next,
                         a_vv / mu_next)};
}

Vec interpolate_IN(const PartitionOfUnity& pou, const LocalSpectralBasis& bases,
                   const std::vector<Index>& L_node, const Vec& v, Index n) {
  Vec out = Vec::Zero(n);
  for (std::size_t i = 0; i < bases.neumann.size(); ++i) {
    const Index L = L_node[i];
    if (L == 0) continue;
    const LocalBasis& nb = bases.neumann[i];
    const Vec vloc = restrict_vec(v, nb.global_idx);
    const Vec c = nb.pairs.vectors.leftCols(L).transpose() * (nb.pairs.M * vloc);
    const Vec proj = nb.pairs.vectors.leftCols(L) * c;
    const std::vector<double> chi = hat_values_at(pou.hats[i], nb.global_idx);
    for (std::size_t k = 0; k < nb.global_idx.size(); ++k)
      out[nb.global_idx[k]] += chi[k] * proj[k];
  }
  return out;
}

Vec interpolate_JD(const LocalSpectralBasis& bases,
                   const std::vector<Index>& L_elem, const Vec& v, Index n) {
  Vec out = Vec::Zero(n);
  for (std::size_t K = 0; K < bases.dirichlet.size(); ++K) {
    const Index L = L_elem[K];
    if (L == 0) continue;
    const LocalBasis& db = bases.dirichlet[K];
    const Vec vloc = restrict_vec(v, db.global_idx);
    const Vec c = db.pairs.vectors.leftCols(L).transpose() * (db.pairs.M * vloc);
    const Vec proj = db.pairs.vectors.leftCols(L) * c;
    for (std::size_t k = 0; k < db.global_idx.size(); ++k)
      out[db.global_idx[k]] += proj[k];
  }
  return out;
}

Vec interpolate_I0(const PartitionOfUnity& pou, const LocalSpectralBasis& bases,
                   const std::vector<Index>& L_node,
                   const std::vector<Index>& L_elem, const Vec& v_N,
                   const Vec& v_D, Index n) {
  return interpolate_IN(pou, bases, L_node, v_N, n) +
         interpolate_JD(bases, L_elem, v_D, n);
}

ErrorReport error_report(const Vec& u_ref, const Vec& u_H, const SpMat& A,
                         const SpMat& M) {
  if (u_ref.size() != u_H.size() || u_ref.size() != A.rows())
    throw std::invalid_argument("error_report: grid mismatch");
  const Vec e = u_ref - u_H;
  ErrorReport rep;
  rep.energy = std::sqrt(std::max(0.0, e.dot(A * e)));
  rep.l2 = std::sqrt(std::max(0.0, e.dot(M * e)));
  const double ref_energy = std::sqrt(std::max(0.0, u_ref.dot(A * u_ref)));
  const double ref_l2 = std::sqrt(std::max(0.0, u_ref.dot(M * u_ref)));
  rep.rel_energy = ref_energy > 0 ? rep.energy / ref_energy : rep.energy;
  rep.rel_l2 = ref_l2 > 0 ? rep.l2 / ref_l2 : rep.l2;
  return rep;
}

std::vector<CheckRow> run_verification_suite(Index n_fine, Index n_coarse,
                                             unsigned seed) {
  std::vector<CheckRow> rows;
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> uexp(-2.0, 2.0);

  const FineGrid fine = build_fine_grid(n_fine, n_fine);
  const CoarseGrid coarse = build_coarse_grid(fine, n_coarse, n_coarse);

  CoefficientField kap_rand = constant_field(n_fine, n_fine, 1.0);
  for (double& v : kap_rand.values) v = std::pow(10.0, uexp(rng));

  const struct {
    const char* tag;
    CoefficientField kappa;
  } media[] = {{"", constant_field(n_fine, n_fine, 1.0)}, {"_hc", kap_rand}};

  for (const auto& medium : media) {
    const std::string tag = medium.tag;
    const SpMat A = assemble_stiffness(fine, medium.kappa);
    const SpMat M = assemble_weighted_mass(fine, medium.kappa);
    const std::vector<Index> interior = fine.interior_nodes();
    const SpMat A0 = restrict_mat(A, interior);
    const SpMat M0 = restrict_mat(M, interior);
    const Index n0 = static_cast<Index>(interior.size());

    SpectralNormContext ctx = make_context(full_dense_eig(A0, M0));
    auto random_vec = [&](Index n) {
      Vec v(n);
      for (Index i = 0; i < n; ++i) v[i] = gauss(rng);
      return v;
    };

    // s = 0 and s = 1 norms reduce to the mass and energy forms.
    {
      const Vec v = random_vec(n0);
      rows.push_back(equality_row("norm_s0_is_l2" + tag, triple_norm(ctx, v, 0.0),
                                  std::sqrt(quad_form(M0, v)), 1e-8));
      rows.push_back(equality_row("norm_s1_is_energy" + tag,
                                  triple_norm(ctx, v, 1.0),
                                  std::sqrt(quad_form(A0, v)), 1e-8));
      const Index k = 2;
      rows.push_back(equality_row(
          "norm_of_eigvec" + tag, triple_norm(ctx, ctx.pairs.vectors.col(k), 3.0),
          std::pow(ctx.pairs.values[k], 1.5), 1e-8));
    }

    // Operator identities.
    {
      const Vec v = random_vec(n0);
      rows.push_back(equality_row("applyA_norm" + tag,
                                  std::sqrt(quad_form(M0, apply_A(ctx, v))),
                                  triple_norm(ctx, v, 2.0), 1e-8));
      const Vec g = random_vec(n0);
      const Vec u = solve_spd(A0, M0 * g, 1e-13);
      rows.push_back(inequality_row("applyA_inverts" + tag,
                                    (apply_A(ctx, u) - g).norm(),
                                    1e-7 * g.norm()));
    }

    // Divergence identity, 5 random loads.
    for (int t = 0; t < 5; ++t) {
      CheckRow row = check_div_identity(ctx, A0, random_vec(n0),
                                        tag + "_" + std::to_string(t));
      rows.push_back(row);
    }

    // Truncation inequalities; tight at v = phi_{L+1}.
    for (Index L : {Index(1), Index(3), Index(7)}) {
      const Vec v = random_vec(n0);
      for (CheckRow& r : check_truncation_inequality(
               ctx, A0, v, L, tag + "_L" + std::to_string(L)))
        rows.push_back(std::move(r));
      const Vec phi = ctx.pairs.vectors.col(L);
      const Vec res = phi - truncate_project(ctx, phi, L);
      rows.push_back(equality_row("truncation_tight" + tag + "_L" + std::to_string(L),
                                  res.dot(M0 * res),
                                  quad_form(A0, phi) / ctx.pairs.values[L], 1e-8));
    }

    // Projections are m-orthogonal: idempotent and m-self-adjoint.
    {
      const Vec v = random_vec(n0), w = random_vec(n0);
      const Vec pv = truncate_project(ctx, v, 5);
      rows.push_back(inequality_row("projection_idempotent" + tag,
                                    (truncate_project(ctx, pv, 5) - pv).norm(),
                                    1e-9 * std::max(1.0, pv.norm())));
      rows.push_back(equality_row("projection_selfadjoint" + tag,
                                  pv.dot(M0 * w),
                                  v.dot(M0 * truncate_project(ctx, w, 5)), 1e-9));
    }

    // A-priori estimate |||u|||_t^2 <= mu_1^{t-s-2} |||g|||_s^2 for t-s-2 <= 0.
    {
      const Vec b = random_vec(n0);
      const Vec u = solve_spd(A0, b, 1e-13);
      const Vec g = solve_spd(M0, b, 1e-13);
      for (double t : {0.0, 1.0, 2.0}) {
        const double lhs = std::pow(triple_norm(ctx, u, t), 2);
        const double rhs = std::pow(ctx.pairs.values[0], t - 2.0) *
                           std::pow(triple_norm(ctx, g, 0.0), 2);
        char name[64];
        std::snprintf(name, sizeof(name), "global_apriori_t%.0f%s", t, tag.c_str());
        rows.push_back(inequality_row(name, lhs, rhs));
      }
    }

    // Element (Dirichlet) a-priori form on a complete element spectrum.
    {
      const Index K = coarse.num_elements() / 2;
      const SpMat Afull = A;  // couplings inside K equal the local assembly
      const Index nK =
          static_cast<Index>(coarse.element_interior_fine_nodes(K).size());
      LocalBasis db = dirichlet_element_basis(coarse, K, Afull, M, nK);
      SpectralNormContext ctxK = make_context(db.pairs);
      const SpMat AK = restrict_mat(A, db.global_idx);
      const Index nk = static_cast<Index>(db.global_idx.size());
      const Index L = std::min<Index>(2, nk - 1);
      const Vec v = random_vec(nk);
      const Vec r = v - truncate_project(ctxK, v, L);
      rows.push_back(inequality_row(
          "element_apriori" + tag, quad_form(AK, r),
          std::pow(triple_norm(ctxK, apply_A(ctxK, v), 0.0), 2) /
              ctxK.pairs.values[L]));
    }

    // Neumann patch truncation bound on an interior (floating) patch.
    {
      const Index i = coarse.node(n_coarse / 2, n_coarse / 2);
      const PatchNodes pn = coarse.patch_fine_nodes(i);
      Index nfree = 0;
      for (bool onb : pn.on_domain_boundary)
        if (!onb) ++nfree;
      LocalBasis nb = neumann_patch_basis(coarse, i, medium.kappa, nfree);
      SpectralNormContext ctxP = make_context(nb.pairs);
      std::vector<Index> cells;
      for (Index e : coarse.patch(i))
        for (Index c : coarse.element_fine_cells(e)) cells.push_back(c);
      const SpMat AP =
          assemble_stiffness_on_cells(fine, medium.kappa, cells, nb.global_idx);
      const Index np = static_cast<Index>(nb.global_idx.size());
      const Index L = std::min<Index>(3, np - 1);
      const Vec v = random_vec(np);
      const Vec r = v - truncate_project(ctxP, v, L);
      rows.push_back(inequality_row("patch_truncation_l2" + tag,
                                    r.dot(ctxP.pairs.M * r),
                                    quad_form(AP, v) / ctxP.pairs.values[L]));
      // Energy-norm variant, on a zero-normal-flux sample only.
      const Vec zf = restrict_vec(
          sample_nodal(fine,
                       [](double x, double y) {
                         return std::cos(4 * M_PI * x) * std::cos(4 * M_PI * y);
                       }),
          nb.global_idx);
      const Vec rz = zf - truncate_project(ctxP, zf, L);
      rows.push_back(inequality_row(
          "patch_truncation_energy" + tag, quad_form(AP, rz),
          std::pow(triple_norm(ctxP, zf, 2.0), 2) / ctxP.pairs.values[L]));
    }
  }
  return rows;
}

void write_checks_csv(std::ostream& out, const std::vector<CheckRow>& rows) {
  out << "check,lhs,rhs,slack,pass\n";
  char buf[160];
  for (const CheckRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%.12g,%.12g,%.12g,%d\n", r.name.c_str(),
                  r.lhs, r.rhs, r.slack, r.pass ? 1 : 0);
    out << buf;
  }
}

}  // namespace gmsfem

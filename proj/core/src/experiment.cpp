#include "gmsfem/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace gmsfem {

double exact_u1(double x, double y) {
  return std::sin(M_PI * x) * std::sin(M_PI * y) * (-x + 3 * y);
}

double exact_f1(double x, double y) {
  return 2 * M_PI * std::cos(M_PI * x) * std::sin(M_PI * y) -
         6 * M_PI * std::sin(M_PI * x) * std::cos(M_PI * y) +
         2 * M_PI * M_PI * std::sin(M_PI * x) * std::sin(M_PI * y) * (-x + 3 * y);
}

namespace {
double c_coef(int k, int l) { return 1.0 / (k + 2 * (l - 1)); }
}  // namespace

double exact_u2(double x, double y) {
  double s = 0;
  for (int k = 1; k <= 2; ++k)
    for (int l = 1; l <= 2; ++l)
      s += c_coef(k, l) * std::sin(4 * k * M_PI * x) * std::sin(4 * l * M_PI * y);
  return s;
}

double exact_f2(double x, double y) {
  double s = 0;
  for (int k = 1; k <= 2; ++k)
    for (int l = 1; l <= 2; ++l)
      s += 16.0 * M_PI * M_PI * (k * k + l * l) * c_coef(k, l) *
           std::sin(4 * k * M_PI * x) * std::sin(4 * l * M_PI * y);
  return s;
}

double exact_f2_verbatim(double x, double y) {
  double s = 0;
  for (int k = 1; k <= 2; ++k)
    for (int l = 1; l <= 2; ++l)
      s += 16.0 * (k + l) * c_coef(k, l) * std::sin(4 * k * M_PI * x) *
           std::sin(4 * l * M_PI * y);
  return s;
}

std::vector<double> checkerboard_cells(const CoarseGrid& coarse,
                                       CheckerboardVariant variant) {
  const FineGrid& fine = coarse.fine;
  std::vector<double> cells(static_cast<std::size_t>(fine.num_cells()));
  for (Index cy = 0; cy < fine.ny; ++cy) {
    for (Index cx = 0; cx < fine.nx; ++cx) {
      const Index eX = cx / coarse.rx, eY = cy / coarse.ry;
      double v;
      if (variant == CheckerboardVariant::Parity) {
        v = ((eX + eY) % 2 == 0) ? 1.0 : -1.0;
      } else {
        // row-major 1-based element number: even -> +1, odd -> -1
        v = ((coarse.element(eX, eY) + 1) % 2 == 0) ? 1.0 : -1.0;
      }
      cells[static_cast<std::size_t>(fine.cell(cx, cy))] = v;
    }
  }
  return cells;
}

double checkerboard_f3(const CoarseGrid& coarse, double x, double y,
                       CheckerboardVariant variant) {
  const Index eX = std::min<Index>(static_cast<Index>(x * coarse.NX), coarse.NX - 1);
  const Index eY = std::min<Index>(static_cast<Index>(y * coarse.NY), coarse.NY - 1);
  if (variant == CheckerboardVariant::Parity)
    return ((eX + eY) % 2 == 0) ? 1.0 : -1.0;
  return ((coarse.element(eX, eY) + 1) % 2 == 0) ? 1.0 : -1.0;
}

ExperimentConfig parse_experiment_config(const Config& cfg) {
  ExperimentConfig ec;
  ec.nx = cfg.get_int("grid", "nx", ec.nx);
  ec.ny = cfg.get_int("grid", "ny", ec.ny);
  ec.NX = cfg.get_int("grid", "NX", ec.NX);
  ec.NY = cfg.get_int("grid", "NY", ec.NY);

  ec.coef_type = cfg.get_string("coefficient", "type", ec.coef_type);
  ec.coef_value = cfg.get_double("coefficient", "value", ec.coef_value);
  ec.background = cfg.get_double("coefficient", "background", ec.background);
  ec.channel_value = cfg.get_double("coefficient", "channel_value", ec.channel_value);
  ec.geo_nx = cfg.get_int("coefficient", "geo_nx", ec.geo_nx);
  ec.geo_ny = cfg.get_int("coefficient", "geo_ny", ec.geo_ny);
  ec.raster_path = cfg.get_string("coefficient", "path", ec.raster_path);
  for (const auto& tokens : cfg.get_entries("coefficient", "channel")) {
    if (tokens.size() != 4)
      throw std::runtime_error("config: channel needs 'cx0 cy0 cx1 cy1'");
    ec.channels.push_back({std::stoll(tokens[0]), std::stoll(tokens[1]),
                           std::stoll(tokens[2]), std::stoll(tokens[3])});
  }

  ec.source = cfg.get_string("source", "type", ec.source);
  const std::string checker = cfg.get_string("source", "checkerboard", "parity");
  if (checker == "stripes")
    ec.checker = CheckerboardVariant::Stripes;
  else if (checker == "parity")
    ec.checker = CheckerboardVariant::Parity;
  else
    throw std::runtime_error("config: unknown checkerboard variant '" + checker + "'");

  const std::string mode = cfg.get_string("reference", "mode", "analytic");
  if (mode == "analytic")
    ec.ref_mode = ReferenceMode::Analytic;
  else if (mode == "fine")
    ec.ref_mode = ReferenceMode::FineSolve;
  else if (mode == "refined")
    ec.ref_mode = ReferenceMode::Refined;
  else
    throw std::runtime_error("config: unknown reference mode '" + mode + "'");
  ec.ref_factor = cfg.get_int("reference", "factor", ec.ref_factor);

  auto to_index_list = [](const std::vector<long long>& in) {
    std::vector<Index> out(in.begin(), in.end());
    return out;
  };
  if (cfg.has("sweep", "NN")) ec.NN_list = to_index_list(cfg.get_int_list("sweep", "NN"));
  if (cfg.has("sweep", "ND")) ec.ND_list = to_index_list(cfg.get_int_list("sweep", "ND"));
  if (ec.NN_list.empty() || ec.ND_list.empty())
    throw std::runtime_error("config: sweep lists must be nonempty");

  if (cfg.has("hstudy", "NX")) ec.h_list = to_index_list(cfg.get_int_list("hstudy", "NX"));
  ec.h_NN = cfg.get_int("hstudy", "NN", ec.h_NN);
  ec.h_ND = cfg.get_int("hstudy", "ND", ec.h_ND);

  ec.solve_tol = cfg.get_double("solver", "rel_tol", ec.solve_tol);
  ec.drop_tol = cfg.get_double("solver", "drop_tol", ec.drop_tol);
  ec.dense_cap = cfg.get_int("solver", "dense_cap", ec.dense_cap);
  ec.iterative_threshold =
      cfg.get_int("solver", "iterative_threshold", ec.iterative_threshold);
  ec.residual_tol = cfg.get_double("solver", "residual_tol", ec.residual_tol);
  ec.seed = static_cast<unsigned>(cfg.get_int("", "seed", ec.seed));
  ec.timing = cfg.get_string("output", "timing", "off") == "on";
  ec.output_path = cfg.get_string("output", "path", ec.output_path);
  return ec;
}

struct ExperimentRunner::Impl {
  FineGrid fine;
  CoarseGrid coarse;
  CoefficientField kappa;
  SpMat A, M;
  LinearSystem sys;
  Vec b;
  Vec u_h;
  PartitionOfUnity pou;
  std::optional<LocalSpectralBasis> bases;
  Index basis_nn = 0, basis_nd = 0;

  // refined-grid reference, built on demand
  std::optional<FineGrid> ref_fine;
  SpMat ref_A, ref_M;
  Vec ref_u;

  std::optional<Vec> u_ref;  // reference on the fine grid (analytic / fine)
};

namespace {

ScalarField source_field(const std::string& source) {
  if (source == "f1") return exact_f1;
  if (source == "f2") return exact_f2;
  if (source == "f2_verbatim") return exact_f2_verbatim;
  return nullptr;
}

Vec assemble_source(const ExperimentConfig& cfg, const FineGrid& fine,
                    const CoarseGrid& coarse) {
  if (cfg.source == "checkerboard")
    return assemble_load(fine, checkerboard_cells(coarse, cfg.checker));
  ScalarField f = source_field(cfg.source);
  if (!f) throw std::runtime_error("unknown source '" + cfg.source + "'");
  return assemble_load(fine, f);
}

CoefficientField build_coefficient(const ExperimentConfig& cfg,
                                   const FineGrid& fine) {
  if (cfg.coef_type == "constant")
    return constant_field(fine.nx, fine.ny, cfg.coef_value);
  if (cfg.coef_type == "channels")
    return resample_to(channels_field(cfg.geo_nx, cfg.geo_ny, cfg.background,
                                      cfg.channel_value, cfg.channels),
                       fine);
  if (cfg.coef_type == "raster")
    return resample_to(load_raster(cfg.raster_path), fine);
  throw std::runtime_error("unknown coefficient type '" + cfg.coef_type + "'");
}

std::vector<Index> boundary_indices(const FineGrid& fine) {
  std::vector<Index> out;
  for (Index iy = 0; iy <= fine.ny; ++iy)
    for (Index ix = 0; ix <= fine.nx; ++ix)
      if (fine.on_boundary(ix, iy)) out.push_back(fine.node(ix, iy));
  return out;
}

}  // namespace

ExperimentRunner::ExperimentRunner(ExperimentConfig cfg)
    : cfg_(std::move(cfg)), impl_(std::make_unique<Impl>()) {
  impl_->fine = build_fine_grid(cfg_.nx, cfg_.ny);
  impl_->coarse = build_coarse_grid(impl_->fine, cfg_.NX, cfg_.NY);
  impl_->kappa = build_coefficient(cfg_, impl_->fine);
  impl_->A = assemble_stiffness(impl_->fine, impl_->kappa);
  impl_->M = assemble_weighted_mass(impl_->fine, impl_->kappa);
  impl_->b = assemble_source(cfg_, impl_->fine, impl_->coarse);
  impl_->sys =
      apply_homogeneous_dirichlet(impl_->A, impl_->b, boundary_indices(impl_->fine));
  impl_->u_h = solve_spd(impl_->sys, 1e-12);
  impl_->pou = build_partition_of_unity(impl_->fine, impl_->coarse);
}

ExperimentRunner::~ExperimentRunner() = default;

const FineGrid& ExperimentRunner::fine() const { return impl_->fine; }
const CoarseGrid& ExperimentRunner::coarse() const { return impl_->coarse; }
const CoefficientField& ExperimentRunner::kappa() const { return impl_->kappa; }
const SpMat& ExperimentRunner::stiffness() const { return impl_->A; }
const SpMat& ExperimentRunner::mass() const { return impl_->M; }
const Vec& ExperimentRunner::load() const { return impl_->b; }
const Vec& ExperimentRunner::fine_solution() const { return impl_->u_h; }
const PartitionOfUnity& ExperimentRunner::pou() const { return impl_->pou; }

const LocalSpectralBasis& ExperimentRunner::bases() {
  const Index want_nn =
      *std::max_element(cfg_.NN_list.begin(), cfg_.NN_list.end()) + 1;
  const Index want_nd =
      *std::max_element(cfg_.ND_list.begin(), cfg_.ND_list.end()) + 1;
  if (!impl_->bases || impl_->basis_nn < want_nn || impl_->basis_nd < want_nd) {
    EigOptions opts;
    opts.dense_cap = cfg_.dense_cap;
    opts.iterative_threshold = cfg_.iterative_threshold;
    opts.residual_tol = cfg_.residual_tol;
    opts.seed = cfg_.seed;
    impl_->bases = build_local_bases(impl_->coarse, impl_->kappa, impl_->A,
                                     impl_->M, want_nn, want_nd, opts);
    impl_->basis_nn = want_nn;
    impl_->basis_nd = want_nd;
  }
  return *impl_->bases;
}

CoarseSpace ExperimentRunner::build_space(Index NN, Index ND) {
  const LocalSpectralBasis& lb = bases();
  const std::vector<Index> L_node(lb.neumann.size(), NN);
  const std::vector<Index> L_elem(lb.dirichlet.size(), ND);
  return assemble_coarse_space(impl_->pou, lb, L_node, L_elem,
                               impl_->fine.num_nodes());
}

CoarseSolution ExperimentRunner::solve_point(const CoarseSpace& space) {
  return coarse_galerkin_solve(space, impl_->sys.A, impl_->sys.b, cfg_.drop_tol);
}

ErrorReport ExperimentRunner::fine_error(const Vec& u) const {
  return error_report(impl_->u_h, u, impl_->A, impl_->M);
}

ErrorReport ExperimentRunner::reference_error(const Vec& u) {
  switch (cfg_.ref_mode) {
    case ReferenceMode::FineSolve:
      return fine_error(u);
    case ReferenceMode::Analytic: {
      if (!impl_->u_ref) {
        ScalarField exact = nullptr;
        if (cfg_.source == "f1") exact = exact_u1;
        if (cfg_.source == "f2") exact = exact_u2;
        if (!exact)
          throw std::runtime_error("analytic reference unavailable for source '" +
                                   cfg_.source + "'");
        impl_->u_ref = sample_nodal(impl_->fine, exact);
      }
      return error_report(*impl_->u_ref, u, impl_->A, impl_->M);
    }
    case ReferenceMode::Refined: {
      if (!impl_->ref_fine) {
        if (cfg_.ref_factor < 2)
          throw std::runtime_error("refined reference needs factor >= 2");
        const FineGrid rf =
            build_fine_grid(cfg_.nx * cfg_.ref_factor, cfg_.ny * cfg_.ref_factor);
        const CoarseGrid rc = build_coarse_grid(rf, cfg_.NX, cfg_.NY);
        const CoefficientField rkappa = resample_to(impl_->kappa, rf);
        impl_->ref_A = assemble_stiffness(rf, rkappa);
        impl_->ref_M = assemble_weighted_mass(rf, rkappa);
        const Vec rb = assemble_source(cfg_, rf, rc);
        const LinearSystem rsys =
            apply_homogeneous_dirichlet(impl_->ref_A, rb, boundary_indices(rf));
        impl_->ref_u = solve_spd(rsys, 1e-12);
        impl_->ref_fine = rf;
      }
      const Vec Pu = prolongate(impl_->fine, *impl_->ref_fine, u);
      return error_report(impl_->ref_u, Pu, impl_->ref_A, impl_->ref_M);
    }
  }
  throw std::logic_error("reference_error: unreachable");
}

ErrorRecord ExperimentRunner::evaluate_point(Index NN, Index ND) {
  if (NN == 0 && ND == 0)
    throw std::invalid_argument("evaluate_point: N_N and N_D cannot both be 0");
  const auto t0 = std::chrono::steady_clock::now();
  const CoarseSpace space = build_space(NN, ND);
  const CoarseSolution sol = solve_point(space);
  const ErrorReport rep = reference_error(sol.u_H);
  const auto t1 = std::chrono::steady_clock::now();

  const LocalSpectralBasis& lb = bases();
  const LeftOut lo =
      min_left_out(lb, std::vector<Index>(lb.neumann.size(), NN),
                   std::vector<Index>(lb.dirichlet.size(), ND));
  ErrorRecord rec;
  rec.NN = NN;
  rec.ND = ND;
  rec.lambda_next = lo.lambda_next;
  rec.mu_next = lo.mu_next;
  rec.dim = space.R.rows();
  rec.rank = sol.retained_rank;
  rec.err_energy = rep.energy;
  rec.err_l2 = rep.l2;
  rec.rel_energy = rep.rel_energy;
  rec.rel_l2 = rep.rel_l2;
  if (cfg_.timing)
    rec.seconds = std::chrono::duration<double>(t1 - t0).count();
  return rec;
}

SweepResult ExperimentRunner::run_sweep() {
  SweepResult result;
  std::vector<Index> nds = cfg_.ND_list, nns = cfg_.NN_list;
  std::sort(nds.begin(), nds.end());
  std::sort(nns.begin(), nns.end());
  for (Index nd : nds) {
    for (Index nn : nns) {
      try {
        result.records.push_back(evaluate_point(nn, nd));
      } catch (const std::exception& e) {
        result.failures.push_back("NN=" + std::to_string(nn) + " ND=" +
                                  std::to_string(nd) + ": " + e.what());
      }
    }
  }
  return result;
}

ExperimentRunner::HStudyResult ExperimentRunner::run_h_study() {
  if (cfg_.h_list.size() < 2)
    throw std::invalid_argument("run_h_study: need at least 2 coarse sizes");
  EigOptions opts;
  opts.dense_cap = cfg_.dense_cap;
  opts.iterative_threshold = cfg_.iterative_threshold;
  opts.residual_tol = cfg_.residual_tol;
  opts.seed = cfg_.seed;
  HStudyResult out;
  for (Index NXh : cfg_.h_list) {
    const CoarseGrid ch = build_coarse_grid(impl_->fine, NXh, NXh);
    const LocalSpectralBasis lb = build_local_bases(
        ch, impl_->kappa, impl_->A, impl_->M, cfg_.h_NN + 1, cfg_.h_ND + 1, opts);
    const PartitionOfUnity pou = build_partition_of_unity(impl_->fine, ch);
    const CoarseSpace space = assemble_coarse_space(
        pou, lb, std::vector<Index>(lb.neumann.size(), cfg_.h_NN),
        std::vector<Index>(lb.dirichlet.size(), cfg_.h_ND),
        impl_->fine.num_nodes());
    const CoarseSolution sol =
        coarse_galerkin_solve(space, impl_->sys.A, impl_->sys.b, cfg_.drop_tol);
    const ErrorReport rep = fine_error(sol.u_H);
    out.points.emplace_back(ch.H, rep.energy);
  }
  out.slope = fit_loglog_slope(out.points);
  return out;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

void write_records_csv(std::ostream& out, const ExperimentConfig& cfg,
                       const std::vector<ErrorRecord>& records) {
  out << "# gmsfem sweep records\n";
  out << "# grid = " << cfg.nx << "x" << cfg.ny << " coarse " << cfg.NX << "x"
      << cfg.NY << "\n";
  out << "# coefficient = " << cfg.coef_type;
  if (cfg.coef_type == "constant") out << " value=" << fmt(cfg.coef_value);
  if (cfg.coef_type == "channels") {
    out << " geo=" << cfg.geo_nx << "x" << cfg.geo_ny
        << " background=" << fmt(cfg.background)
        << " channel_value=" << fmt(cfg.channel_value);
    for (const CellRect& r : cfg.channels)
      out << " channel=[" << r.cx0 << "," << r.cy0 << "," << r.cx1 << ","
          << r.cy1 << "]";
  }
  if (cfg.coef_type == "raster") out << " path=" << cfg.raster_path;
  out << "\n";
  out << "# source = " << cfg.source;
  if (cfg.source == "checkerboard")
    out << " variant="
        << (cfg.checker == CheckerboardVariant::Parity ? "parity" : "stripes");
  out << "\n";
  out << "# reference = "
      << (cfg.ref_mode == ReferenceMode::Analytic
              ? "analytic"
              : cfg.ref_mode == ReferenceMode::FineSolve ? "fine" : "refined");
  if (cfg.ref_mode == ReferenceMode::Refined) out << " factor=" << cfg.ref_factor;
  out << "\n";
  out << "# solver = rel_tol:" << fmt(cfg.solve_tol)
      << " drop_tol:" << fmt(cfg.drop_tol) << " dense_cap:" << cfg.dense_cap
      << " iterative_threshold:" << cfg.iterative_threshold
      << " residual_tol:" << fmt(cfg.residual_tol) << " seed:" << cfg.seed << "\n";
  out << "N_N,N_D,lambda_next,mu_next,dim,rank,err_energy,err_l2,rel_energy,"
         "rel_l2,seconds\n";
  for (const ErrorRecord& r : records) {
    out << r.NN << "," << r.ND << "," << fmt(r.lambda_next) << ","
        << fmt(r.mu_next) << "," << r.dim << "," << r.rank << ","
        << fmt(r.err_energy) << "," << fmt(r.err_l2) << "," << fmt(r.rel_energy)
        << "," << fmt(r.rel_l2) << "," << fmt(r.seconds) << "\n";
  }
}

std::vector<ErrorRecord> parse_records_csv(std::istream& in) {
  std::vector<ErrorRecord> records;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {  // column header
      header_seen = true;
      continue;
    }
    std::istringstream ls(line);
    std::string tok;
    std::vector<std::string> cols;
    while (std::getline(ls, tok, ',')) cols.push_back(tok);
    if (cols.size() != 11)
      throw std::runtime_error("parse_records_csv: expected 11 columns, got " +
                               std::to_string(cols.size()));
    ErrorRecord r;
    r.NN = std::stoll(cols[0]);
    r.ND = std::stoll(cols[1]);
    r.lambda_next = std::stod(cols[2]);
    r.mu_next = std::stod(cols[3]);
    r.dim = std::stoll(cols[4]);
    r.rank = std::stoll(cols[5]);
    r.err_energy = std::stod(cols[6]);
    r.err_l2 = std::stod(cols[7]);
    r.rel_energy = std::stod(cols[8]);
    r.rel_l2 = std::stod(cols[9]);
    r.seconds = std::stod(cols[10]);
    records.push_back(r);
  }
  return records;
}

void emit_plot_data(std::ostream& out, const std::vector<ErrorRecord>& records,
                    const std::string& x_axis, const std::string& y_axis) {
  if (records.empty()) throw std::invalid_argument("emit_plot_data: no records");
  if (x_axis != "lambda" && x_axis != "NN")
    throw std::invalid_argument("emit_plot_data: x axis must be lambda or NN");
  if (y_axis != "energy" && y_axis != "l2")
    throw std::invalid_argument("emit_plot_data: y axis must be energy or l2");
  std::vector<ErrorRecord> sorted = records;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    return a.ND != b.ND ? a.ND < b.ND : a.NN < b.NN;
  });
  out << "N_D," << (x_axis == "lambda" ? "lambda_next" : "N_N") << ","
      << (y_axis == "energy" ? "err_energy" : "err_l2") << ",log10_x,log10_y\n";
  for (const ErrorRecord& r : sorted) {
    const double x = x_axis == "lambda" ? r.lambda_next : double(r.NN);
    const double y = y_axis == "energy" ? r.err_energy : r.err_l2;
    out << r.ND << "," << fmt(x) << "," << fmt(y) << "," << fmt(std::log10(x))
        << "," << fmt(std::log10(y)) << "\n";
  }
}

Vec prolongate(const FineGrid& from, const FineGrid& to, const Vec& v) {
  if (to.nx % from.nx != 0 || to.ny % from.ny != 0)
    throw std::invalid_argument("prolongate: grids are not nested");
  const Index rx = to.nx / from.nx, ry = to.ny / from.ny;
  Vec out(to.num_nodes());
  for (Index iy = 0; iy <= to.ny; ++iy) {
    for (Index ix = 0; ix <= to.nx; ++ix) {
      const Index cx = std::min(ix / rx, from.nx - 1);
      const Index cy = std::min(iy / ry, from.ny - 1);
      const double tx = double(ix - cx * rx) / rx;
      const double ty = double(iy - cy * ry) / ry;
      const double v00 = v[from.node(cx, cy)], v10 = v[from.node(cx + 1, cy)];
      const double v01 = v[from.node(cx, cy + 1)],
                   v11 = v[from.node(cx + 1, cy + 1)];
      out[to.node(ix, iy)] = (1 - tx) * (1 - ty) * v00 + tx * (1 - ty) * v10 +
                             (1 - tx) * ty * v01 + tx * ty * v11;
    }
  }
  return out;
}

double fit_loglog_slope(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2)
    throw std::invalid_argument("fit_loglog_slope: need at least 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(points.size());
  for (const auto& [x, y] : points) {
    const double lx = std::log(x), ly = std::log(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace gmsfem

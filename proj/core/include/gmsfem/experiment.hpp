#ifndef GMSFEM_EXPERIMENT_HPP
#define GMSFEM_EXPERIMENT_HPP

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gmsfem/analysis.hpp"
#include "gmsfem/config.hpp"
#include "gmsfem/space.hpp"

namespace gmsfem {

// Manufactured pairs: -div(grad u) = f with u = 0 on the boundary.
double exact_u1(double x, double y);
double exact_f1(double x, double y);
double exact_u2(double x, double y);
double exact_f2(double x, double y);           // prefactor consistent with -lap u2
double exact_f2_verbatim(double x, double y);  // as printed; does not match u2

enum class CheckerboardVariant { Parity, Stripes };

/// +1/-1 source alternating over coarse cells. Parity alternates in both
/// axes (checkerboard); Stripes alternates with the row-major element number.
std::vector<double> checkerboard_cells(const CoarseGrid& coarse,
                                       CheckerboardVariant variant);
double checkerboard_f3(const CoarseGrid& coarse, double x, double y,
                       CheckerboardVariant variant = CheckerboardVariant::Parity);

enum class ReferenceMode { Analytic, FineSolve, Refined };

struct ExperimentConfig {
  Index nx = 128, ny = 128, NX = 4, NY = 4;

  std::string coef_type = "constant";  // constant | channels | raster
  double coef_value = 1.0;
  double background = 1.0, channel_value = 1e4;
  std::vector<CellRect> channels;  // on the geological grid
  Index geo_nx = 64, geo_ny = 64;
  std::string raster_path;

  std::string source = "f1";  // f1 | f2 | f2_verbatim | checkerboard
  CheckerboardVariant checker = CheckerboardVariant::Parity;

  ReferenceMode ref_mode = ReferenceMode::Analytic;
  Index ref_factor = 2;

  std::vector<Index> NN_list{1, 5, 10, 20, 40};
  std::vector<Index> ND_list{0, 5, 10, 15, 20};

  std::vector<Index> h_list;  // coarse cell counts for the H study
  Index h_NN = 10, h_ND = 10;

  double solve_tol = 1e-10;
  double drop_tol = 1e-10;
  Index dense_cap = 4096;
  Index iterative_threshold = 256;
  double residual_tol = 1e-8;
  unsigned seed = 12345;
  bool timing = false;  // off keeps CSV output byte-reproducible
  std::string output_path = "records.csv";
};

ExperimentConfig parse_experiment_config(const Config& cfg);

/// One sweep point.
struct ErrorRecord {
  Index NN = 0, ND = 0;
  double lambda_next = 0, mu_next = 0;
  Index dim = 0, rank = 0;
  double err_energy = 0, err_l2 = 0, rel_energy = 0, rel_l2 = 0;
  double seconds = 0;
};

struct SweepResult {
  std::vector<ErrorRecord> records;      // sorted by (ND, NN)
  std::vector<std::string> failures;     // per-point error messages
};

/// Shared state of one experiment: grids, assembled forms, fine reference
/// solve, and the local eigenbases computed once at the maximum counts and
/// truncated per sweep point.
class ExperimentRunner {
 public:
  explicit ExperimentRunner(ExperimentConfig cfg);
  ~ExperimentRunner();

  const ExperimentConfig& config() const { return cfg_; }
  const FineGrid& fine() const;
  const CoarseGrid& coarse() const;
  const CoefficientField& kappa() const;
  const SpMat& stiffness() const;
  const SpMat& mass() const;
  const Vec& load() const;
  const Vec& fine_solution() const;
  const PartitionOfUnity& pou() const;
  /// Built on first use, with one spare pair beyond the largest sweep counts.
  const LocalSpectralBasis& bases();

  CoarseSpace build_space(Index NN, Index ND);
  CoarseSolution solve_point(const CoarseSpace& space);

  /// Error of a fine-grid field against the configured reference.
  ErrorReport reference_error(const Vec& u) ;
  /// Error against the fine Galerkin solution (used for nestedness checks).
  ErrorReport fine_error(const Vec& u) const;

  ErrorRecord evaluate_point(Index NN, Index ND);
  SweepResult run_sweep();

  struct HStudyResult {
    std::vector<std::pair<double, double>> points;  // (H, energy error)
    double slope = 0;  // least-squares slope of log err vs log H
  };
  HStudyResult run_h_study();

 private:
  ExperimentConfig cfg_;
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

void write_records_csv(std::ostream& out, const ExperimentConfig& cfg,
                       const std::vector<ErrorRecord>& records);
std::vector<ErrorRecord> parse_records_csv(std::istream& in);

/// Plot-ready CSV: one series per N_D with precomputed log-log columns.
/// x_axis: "lambda" or "NN"; y_axis: "energy" or "l2".
void emit_plot_data(std::ostream& out, const std::vector<ErrorRecord>& records,
                    const std::string& x_axis, const std::string& y_axis);

/// Bilinear prolongation between nested structured grids.
Vec prolongate(const FineGrid& from, const FineGrid& to, const Vec& v);

double fit_loglog_slope(const std::vector<std::pair<double, double>>& points);

}  // namespace gmsfem

#endif

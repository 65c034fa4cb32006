// Command-line harness: coarse-space sweeps, H-refinement studies, and the
// spectral identity verification suite.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "gmsfem/analysis.hpp"
#include "gmsfem/experiment.hpp"

namespace {

gmsfem::ExperimentConfig load_config(const std::string& path) {
  return gmsfem::parse_experiment_config(gmsfem::Config::parse_file(path));
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
  out << content;
}

int cmd_run(const std::string& config_path, long long nn, long long nd) {
  gmsfem::ExperimentRunner runner(load_config(config_path));
  if (nn < 0) nn = runner.config().NN_list.front();
  if (nd < 0) nd = runner.config().ND_list.front();
  const gmsfem::ErrorRecord r = runner.evaluate_point(nn, nd);
  std::printf("N_N=%lld N_D=%lld dim=%lld rank=%lld\n", (long long)r.NN,
              (long long)r.ND, (long long)r.dim, (long long)r.rank);
  std::printf("lambda_next=%.6g mu_next=%.6g\n", r.lambda_next, r.mu_next);
  std::printf("err_energy=%.6g err_l2=%.6g rel_energy=%.6g rel_l2=%.6g\n",
              r.err_energy, r.err_l2, r.rel_energy, r.rel_l2);
  return 0;
}

int cmd_sweep(const std::string& config_path, std::string output,
              const std::string& plot, const std::string& plot_x,
              const std::string& plot_y) {
  gmsfem::ExperimentRunner runner(load_config(config_path));
  if (output.empty()) output = runner.config().output_path;
  const gmsfem::SweepResult result = runner.run_sweep();

  std::ostringstream csv;
  gmsfem::write_records_csv(csv, runner.config(), result.records);
  write_file(output, csv.str());
  std::printf("wrote %zu records to %s\n", result.records.size(), output.c_str());

  if (!plot.empty()) {
    std::ostringstream ps;
    gmsfem::emit_plot_data(ps, result.records, plot_x, plot_y);
    write_file(plot, ps.str());
    std::printf("wrote plot data to %s\n", plot.c_str());
  }
  for (const std::string& f : result.failures)
    std::fprintf(stderr, "sweep point failed: %s\n", f.c_str());
  return result.failures.empty() ? 0 : 1;
}

int cmd_hstudy(const std::string& config_path, std::string output) {
  gmsfem::ExperimentRunner runner(load_config(config_path));
  if (output.empty()) output = runner.config().output_path;
  const auto result = runner.run_h_study();
  std::ostringstream csv;
  char buf[96];
  std::snprintf(buf, sizeof(buf), "# fitted slope = %.12g\n", result.slope);
  csv << buf << "H,err_energy\n";
  for (const auto& [H, err] : result.points) {
    std::snprintf(buf, sizeof(buf), "%.12g,%.12g\n", H, err);
    csv << buf;
  }
  write_file(output, csv.str());
  std::printf("H-study slope: %.4f (%zu points) -> %s\n", result.slope,
              result.points.size(), output.c_str());
  return 0;
}

int cmd_verify(long long size, long long coarse, unsigned seed,
               const std::string& output) {
  const std::vector<gmsfem::CheckRow> rows =
      gmsfem::run_verification_suite(size, coarse, seed);
  int failures = 0;
  std::printf("%-36s %14s %14s %12s  %s\n", "check", "lhs", "rhs", "slack",
              "status");
  for (const auto& r : rows) {
    std::printf("%-36s %14.6g %14.6g %12.3g  %s\n", r.name.c_str(), r.lhs, r.rhs,
                r.slack, r.pass ? "pass" : "FAIL");
    if (!r.pass) ++failures;
  }
  std::printf("%d/%zu checks passed\n", (int)rows.size() - failures, rows.size());
  if (!output.empty()) {
    std::ostringstream csv;
    gmsfem::write_checks_csv(csv, rows);
    write_file(output, csv.str());
  }
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GMsFEM spectral coarse spaces for high-contrast elliptic problems"};
  app.require_subcommand(1);

  std::string config_path, output, plot, plot_x = "lambda", plot_y = "energy";
  long long nn = -1, nd = -1;
  long long vsize = 8, vcoarse = 4;
  unsigned vseed = 20240817;

  CLI::App* run = app.add_subcommand("run", "solve a single coarse configuration");
  run->add_option("--config", config_path, "config file")->required();
  run->add_option("--NN", nn, "Neumann functions per node");
  run->add_option("--ND", nd, "Dirichlet functions per element");

  CLI::App* sweep = app.add_subcommand("sweep", "run the (N_N, N_D) sweep");
  sweep->add_option("--config", config_path, "config file")->required();
  sweep->add_option("--output", output, "records CSV path (overrides config)");
  sweep->add_option("--plot", plot, "also write plot-ready CSV here");
  sweep->add_option("--plot-x", plot_x, "plot x axis: lambda | NN");
  sweep->add_option("--plot-y", plot_y, "plot y axis: energy | l2");

  CLI::App* hstudy = app.add_subcommand("hstudy", "coarse-size refinement study");
  hstudy->add_option("--config", config_path, "config file")->required();
  hstudy->add_option("--output", output, "CSV path (overrides config)");

  CLI::App* verify =
      app.add_subcommand("verify", "run the spectral identity/inequality suite");
  verify->add_option("--size", vsize, "fine cells per axis (default 8)");
  verify->add_option("--coarse", vcoarse, "coarse cells per axis (default 4)");
  verify->add_option("--seed", vseed, "random seed");
  verify->add_option("--output", output, "also write the report CSV here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, nn, nd);
    if (sweep->parsed()) return cmd_sweep(config_path, output, plot, plot_x, plot_y);
    if (hstudy->parsed()) return cmd_hstudy(config_path, output);
    if (verify->parsed()) return cmd_verify(vsize, vcoarse, vseed, output);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}

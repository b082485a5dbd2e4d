// Command-line front end for the measurements-by-design NF reconstruction
// pipeline: single runs, calibration / SNR / truncation sweeps, and basis
// container management.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mebd/pipeline.hpp"

namespace {

struct CommonArgs {
  std::string scenario_path;
  std::string out_dir = "out";
  std::string basis_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> snr_db;
  std::optional<double> eta0;
  std::optional<bool> estimate_noise;
  std::optional<double> tol_phi;
  std::optional<int> max_iter;
  std::optional<double> zero_threshold;
  std::optional<double> omp_tol;
  std::optional<int> omp_max_sparsity;
  int trials = 1;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_trials) {
  cmd->add_option("scenario", args.scenario_path, "Scenario JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", args.out_dir, "Output directory");
  cmd->add_option("--basis", args.basis_path, "Reuse a saved basis container instead of re-simulating")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", args.seed, "Override the scenario RNG seed");
  cmd->add_option("--snr", args.snr_db, "Override the scenario SNR [dB]");
  cmd->add_option("--eta0", args.eta0, "Override the BCS noise-variance initial guess");
  cmd->add_option("--estimate-noise", args.estimate_noise,
                  "Re-estimate the noise variance during the solve (0/1)");
  cmd->add_option("--tol-phi", args.tol_phi, "BCS stopping tolerance on the likelihood gain");
  cmd->add_option("--max-iter", args.max_iter, "BCS iteration cap");
  cmd->add_option("--zero-threshold", args.zero_threshold,
                  "Relative threshold for counting non-null coefficients");
  cmd->add_option("--omp-tol", args.omp_tol, "OMP relative residual stopping tolerance");
  cmd->add_option("--omp-max-sparsity", args.omp_max_sparsity,
                  "OMP selection budget (0 = half the dictionary)");
  if (with_trials) cmd->add_option("--trials", args.trials, "Noise realizations per sweep point");
}

mebd::Scenario load_with_overrides(const CommonArgs& args) {
  mebd::Scenario sc = mebd::load_scenario(args.scenario_path);
  if (args.seed) sc.seed = *args.seed;
  if (args.snr_db) sc.snr_db = *args.snr_db;
  if (args.eta0) {
    sc.eta0 = *args.eta0;
    sc.bcs.eta0 = *args.eta0;
  }
  if (args.estimate_noise) sc.bcs.estimate_noise = *args.estimate_noise;
  if (args.tol_phi) sc.bcs.tol_phi = *args.tol_phi;
  if (args.max_iter) sc.bcs.max_iter = *args.max_iter;
  if (args.zero_threshold) sc.bcs.zero_threshold = *args.zero_threshold;
  if (args.omp_tol) sc.omp.residual_tol = *args.omp_tol;
  if (args.omp_max_sparsity) sc.omp.max_sparsity = *args.omp_max_sparsity;
  return sc;
}

std::vector<double> default_eta0_grid() {
  // 9 decades, 1e-7 .. 1e+1
  std::vector<double> grid;
  for (int e = -7; e <= 1; ++e) grid.push_back(std::pow(10.0, e));
  return grid;
}

void print_report(const char* name, const mebd::ErrorReport& rep) {
  std::printf("%s: xi = %.2f dB, max NF error = %.2f dB, max FF deviation = %.2f dB, "
              "l0 = %d, factors = {",
              name, rep.xi_db, rep.max_nf_error_db, rep.ff_max_dev_db, rep.sparsity_l0);
  for (std::size_t i = 0; i < rep.identified_factors.size(); ++i)
    std::printf("%s%d", i ? ", " : "", rep.identified_factors[i]);
  std::printf("}\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Measurements-by-design Bayesian compressive sensing for near-field "
               "antenna characterization"};
  app.require_subcommand(1);

  CommonArgs run_args;
  CLI::App* run = app.add_subcommand("run", "Single end-to-end experiment");
  add_common(run, run_args, false);

  CommonArgs eta_args;
  std::vector<double> eta0_list;
  std::vector<double> snr_list;
  CLI::App* sweep_eta = app.add_subcommand("sweep-eta0", "Xi as a function of eta0 and SNR");
  add_common(sweep_eta, eta_args, true);
  sweep_eta->add_option("--eta0-list", eta0_list, "eta0 grid")->delimiter(',');
  sweep_eta->add_option("--snr-list", snr_list, "SNR grid [dB]")->delimiter(',');

  CommonArgs snr_args;
  std::vector<double> snr_points;
  CLI::App* sweep_snr_cmd = app.add_subcommand("sweep-snr", "Xi of both solvers vs SNR");
  add_common(sweep_snr_cmd, snr_args, true);
  sweep_snr_cmd->add_option("--snr-list", snr_points, "SNR grid [dB]")->delimiter(',');

  CommonArgs trunc_args;
  std::vector<double> sides;
  CLI::App* sweep_trunc = app.add_subcommand("sweep-truncation",
                                             "Xi of both solvers vs probing-plane side");
  add_common(sweep_trunc, trunc_args, true);
  sweep_trunc->add_option("--sides", sides, "Probing-plane sides [lambda]")->delimiter(',');

  std::string basis_scenario, basis_out, basis_in;
  CLI::App* basis = app.add_subcommand("basis", "Over-complete basis management");
  basis->require_subcommand(1);
  CLI::App* basis_build = basis->add_subcommand("build", "Build a basis and save it");
  basis_build->add_option("scenario", basis_scenario, "Scenario JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  basis_build->add_option("--out", basis_out, "Basis container path")->required();
  CLI::App* basis_load = basis->add_subcommand("load", "Load a basis container and summarize it");
  basis_load->add_option("basis", basis_in, "Basis container path")
      ->required()
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const mebd::Scenario sc = load_with_overrides(run_args);
      std::optional<mebd::OvercompleteBasis> prebuilt;
      if (!run_args.basis_path.empty()) prebuilt = mebd::load_basis(run_args.basis_path);
      const mebd::ExperimentResult res =
          mebd::run_experiment(sc, prebuilt ? &*prebuilt : nullptr);
      mebd::export_results(res, sc, run_args.out_dir);
      print_report("bcs", res.bcs_report);
      print_report("omp", res.omp_report);
      std::printf("results written to %s\n", run_args.out_dir.c_str());
    } else if (*sweep_eta) {
      const mebd::Scenario sc = load_with_overrides(eta_args);
      if (eta0_list.empty()) eta0_list = sc.eta0_sweep.empty() ? default_eta0_grid() : sc.eta0_sweep;
      if (snr_list.empty()) {
        if (!sc.snr_sweep.empty()) snr_list = sc.snr_sweep;
        else if (sc.snr_db) snr_list = {*sc.snr_db};
        else snr_list = {20.0, 50.0};
      }
      std::optional<mebd::OvercompleteBasis> prebuilt;
      if (!eta_args.basis_path.empty()) prebuilt = mebd::load_basis(eta_args.basis_path);
      const auto rows = mebd::sweep_eta0(sc, eta0_list, snr_list, eta_args.trials,
                                         prebuilt ? &*prebuilt : nullptr);
      std::filesystem::create_directories(eta_args.out_dir);
      mebd::write_eta0_csv(rows, eta_args.out_dir + "/eta0_sweep.csv");
      for (const auto& r : rows)
        if (r.argmin)
          std::printf("snr %.1f dB: best eta0 = %g (xi = %.2f dB)\n", r.snr_db, r.eta0, r.xi_db);
      std::printf("sweep written to %s/eta0_sweep.csv\n", eta_args.out_dir.c_str());
    } else if (*sweep_snr_cmd) {
      const mebd::Scenario sc = load_with_overrides(snr_args);
      if (snr_points.empty())
        snr_points = sc.snr_sweep.empty() ? std::vector<double>{20, 30, 40, 50} : sc.snr_sweep;
      std::optional<mebd::OvercompleteBasis> prebuilt;
      if (!snr_args.basis_path.empty()) prebuilt = mebd::load_basis(snr_args.basis_path);
      const auto rows = mebd::sweep_snr(sc, snr_points, snr_args.trials,
                                        prebuilt ? &*prebuilt : nullptr);
      std::filesystem::create_directories(snr_args.out_dir);
      mebd::write_snr_csv(rows, snr_args.out_dir + "/snr_sweep.csv");
      std::printf("sweep written to %s/snr_sweep.csv\n", snr_args.out_dir.c_str());
    } else if (*sweep_trunc) {
      const mebd::Scenario sc = load_with_overrides(trunc_args);
      if (sides.empty()) sides = {sc.measurements.side};
      std::optional<mebd::OvercompleteBasis> prebuilt;
      if (!trunc_args.basis_path.empty()) prebuilt = mebd::load_basis(trunc_args.basis_path);
      const auto sweep = mebd::sweep_truncation(sc, sides, trunc_args.trials,
                                                prebuilt ? &*prebuilt : nullptr);
      mebd::write_truncation_csv(sweep, trunc_args.out_dir);
      std::printf("sweep written to %s/truncation.csv\n", trunc_args.out_dir.c_str());
    } else if (*basis_build) {
      const mebd::Scenario sc = mebd::load_scenario(basis_scenario);
      const mebd::OvercompleteBasis b = mebd::build_scenario_basis(sc);
      mebd::save_basis(b, basis_out);
      std::printf("basis with %d columns over %d grid points written to %s\n",
                  b.column_count(), b.grid.point_count(), basis_out.c_str());
    } else if (*basis_load) {
      const mebd::OvercompleteBasis b = mebd::load_basis(basis_in);
      std::printf("basis: %d columns, %d grid points, side %g, height %g, step %g\n",
                  b.column_count(), b.grid.point_count(), b.grid.side, b.grid.height,
                  b.grid.step);
      for (const auto& p : b.provenance)
        std::printf("  factor %d, singular index %d, sigma = %g\n", p.factor,
                    p.singular_index, p.singular_value);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

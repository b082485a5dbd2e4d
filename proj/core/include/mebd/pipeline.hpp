#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mebd/metrics.hpp"
#include "mebd/scenario.hpp"

namespace mebd {

/// One noise realization attached to its clean data; the difference is the
/// stored additive-noise vector.
struct NoisyMeasurement {
  Eigen::VectorXcd clean;
  Eigen::VectorXcd noisy;
  std::optional<double> snr_db;  // target; nullopt -> noiseless
  double realized_snr_db = std::numeric_limits<double>::infinity();
  std::uint64_t seed = 0;
};

/// Complex circular Gaussian noise with per-sample variance
/// sigma^2 = mean|clean|^2 / 10^(SNR/10); deterministic under a fixed seed.
NoisyMeasurement add_noise(const Eigen::VectorXcd& clean, std::optional<double> snr_db,
                           std::uint64_t seed);

/// Grid indices of the probing sub-lattice; throws validation_error when the
/// measurement nodes do not coincide with prediction-grid nodes.
std::vector<int> measurement_indices(const MeasurementSpec& spec, const ScanGrid& grid);

/// Deterministic seed mixing for independent trials within a sweep.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b);

struct ExperimentResult {
  FieldMap actual;
  FieldMap bcs_field;
  FieldMap omp_field;
  BcsSolution bcs;
  OmpSolution omp;
  NoisyMeasurement measurement;
  std::vector<int> probe_indices;
  std::vector<BasisColumnInfo> provenance;
  PowerPattern pattern_actual;
  PowerPattern pattern_bcs;
  PowerPattern pattern_omp;
  PowerPattern pattern_truncated;  // actual field zero-filled outside the probing square
  ErrorReport bcs_report;
  ErrorReport omp_report;
};

struct RunOverrides {
  std::optional<double> snr_db;
  std::optional<std::uint64_t> seed;
  std::optional<double> eta0;
  std::optional<bool> estimate_noise;
};

OvercompleteBasis build_scenario_basis(const Scenario& sc);

/// End-to-end run: truth simulation, basis restriction, noise injection,
/// BCS and OMP solves on the same data, full-grid reconstruction, NF-FF
/// transforms and error reports. A prebuilt basis (same scenario) skips the
/// sweep simulations.
ExperimentResult run_experiment(const Scenario& sc, const OvercompleteBasis* prebuilt = nullptr,
                                const RunOverrides& overrides = {});

struct Eta0SweepRow {
  double eta0 = 0.0;
  double snr_db = 0.0;
  double xi_db = 0.0;  // median over trials
  bool argmin = false; // per-SNR minimum
};

/// Calibration study: Xi(eta0, SNR) with the noise variance frozen at eta0
/// during the solve, so the initial guess is actually exercised.
std::vector<Eta0SweepRow> sweep_eta0(const Scenario& sc, const std::vector<double>& eta0s,
                                     const std::vector<double>& snrs, int trials,
                                     const OvercompleteBasis* prebuilt = nullptr);

struct SnrSweepRow {
  double snr_db = 0.0;
  int trial = 0;
  double xi_bcs_db = 0.0;
  double xi_omp_db = 0.0;
  int l0_bcs = 0;
  int l0_omp = 0;
  std::vector<int> factors_bcs;
};

std::vector<SnrSweepRow> sweep_snr(const Scenario& sc, const std::vector<double>& snrs,
                                   int trials, const OvercompleteBasis* prebuilt = nullptr);

struct TruncationRow {
  double side = 0.0;
  int trial = 0;
  double xi_bcs_db = 0.0;
  double xi_omp_db = 0.0;
};

struct TruncationCut {
  Eigen::VectorXd v;
  Eigen::VectorXd actual_db;
  Eigen::VectorXd truncated_db;
  Eigen::VectorXd bcs_db;
  Eigen::VectorXd omp_db;
};

struct TruncationSweep {
  std::vector<TruncationRow> rows;
  std::map<double, TruncationCut> cuts;  // keyed by probing side, trial 0
};

/// Truncation study: the probing square shrinks while the prediction grid
/// stays fixed.
TruncationSweep sweep_truncation(const Scenario& sc, const std::vector<double>& sides,
                                 int trials, const OvercompleteBasis* prebuilt = nullptr);

/// Writes report.json, nf_error_{bcs,omp}.csv, ff_error_{bcs,omp}.csv,
/// cut_u0.csv, coefficients.csv and likelihood_trace.csv; byte-deterministic
/// under a fixed seed.
void export_results(const ExperimentResult& result, const Scenario& sc,
                    const std::string& out_dir);

void write_eta0_csv(const std::vector<Eta0SweepRow>& rows, const std::string& path);
void write_snr_csv(const std::vector<SnrSweepRow>& rows, const std::string& path);
void write_truncation_csv(const TruncationSweep& sweep, const std::string& out_dir);

/// Deterministic shortest-round-trip double formatting shared by every file
/// writer.
std::string format_double(double value);

}  // namespace mebd

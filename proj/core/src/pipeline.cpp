#include "mebd/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <json.hpp>

namespace mebd {

namespace {

using nlohmann::json;

template <typename F>
auto stage(const char* name, F&& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("[") + name + "] " + e.what());
  }
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n == 0) return 0.0;
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file " + path.string());
  return out;
}

}  // namespace

std::string format_double(double value) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) return "0";
  return std::string(buf, ptr);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(splitmix64(base) ^ a) ^ b);
}

NoisyMeasurement add_noise(const Eigen::VectorXcd& clean, std::optional<double> snr_db,
                           std::uint64_t seed) {
  if (clean.size() == 0) throw std::invalid_argument("add_noise: empty data vector");
  NoisyMeasurement out;
  out.clean = clean;
  out.snr_db = snr_db;
  out.seed = seed;
  if (!snr_db || std::isinf(*snr_db)) {
    out.noisy = clean;
    return out;
  }

  const double signal_power = clean.squaredNorm() / clean.size();
  const double sigma2 = signal_power / std::pow(10.0, *snr_db / 10.0);
  const double scale = std::sqrt(0.5 * sigma2);

  // Box-Muller on raw mt19937_64 words keeps the realization identical
  // across standard libraries.
  std::mt19937_64 eng(seed);
  auto uniform = [&eng] { return (eng() >> 11) * 0x1.0p-53; };
  Eigen::VectorXcd noise(clean.size());
  for (int m = 0; m < clean.size(); ++m) {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    noise[m] = Complex(scale * r * std::cos(2.0 * std::numbers::pi * u2),
                       scale * r * std::sin(2.0 * std::numbers::pi * u2));
  }
  out.noisy = clean + noise;
  const double noise_power = noise.squaredNorm();
  out.realized_snr_db = noise_power > 0.0
      ? 10.0 * std::log10(clean.squaredNorm() / noise_power)
      : std::numeric_limits<double>::infinity();
  return out;
}

std::vector<int> measurement_indices(const MeasurementSpec& spec, const ScanGrid& grid) {
  if (spec.nx < 1 || spec.ny < 1)
    throw validation_error("measurements: counts must be >= 1");
  if (spec.side > grid.side + 1e-12)
    throw validation_error("measurements.side: exceeds the prediction grid side");

  auto lattice_cells = [&](int count, const char* axis) {
    std::vector<int> cells(count);
    for (int m = 0; m < count; ++m) {
      const double x = count == 1 ? 0.0 : -0.5 * spec.side + m * spec.side / (count - 1);
      const double cell = (x + 0.5 * grid.side) / grid.step;
      const double rounded = std::round(cell);
      if (std::abs(cell - rounded) > 1e-9 * std::max(1.0, std::abs(cell)))
        throw validation_error(std::string("measurements: ") + axis +
                               " lattice does not coincide with prediction-grid nodes");
      const int ic = static_cast<int>(rounded);
      if (ic < 0 || ic >= grid.points_per_axis)
        throw validation_error("measurements: probe position outside the prediction grid");
      cells[m] = ic;
    }
    return cells;
  };

  const std::vector<int> xs = lattice_cells(spec.nx, "x");
  const std::vector<int> ys = lattice_cells(spec.ny, "y");
  std::vector<int> indices;
  indices.reserve(static_cast<std::size_t>(spec.nx) * spec.ny);
  for (int iy : ys)
    for (int ix : xs) indices.push_back(grid.index(ix, iy));
  return indices;
}

OvercompleteBasis build_scenario_basis(const Scenario& sc) {
  const ScanGrid grid =
      build_grid(sc.prediction_grid.side, sc.prediction_grid.height, sc.prediction_grid.step);
  return build_basis(sc.geometry, sc.nominal, sc.descriptors, grid, sc.truncation);
}

ExperimentResult run_experiment(const Scenario& sc, const OvercompleteBasis* prebuilt,
                                const RunOverrides& overrides) {
  sc.validate();
  ExperimentResult res;

  const ScanGrid grid = stage("grid", [&] {
    return build_grid(sc.prediction_grid.side, sc.prediction_grid.height, sc.prediction_grid.step);
  });

  res.actual = stage("truth", [&] {
    ExcitationVector exc = sc.nominal;
    for (const TruthPerturbation& p : sc.truth_perturbations)
      exc = apply_uncertainty(exc, sc.descriptor_by_id(p.descriptor), p.value);
    return radiate(sc.geometry, exc, grid);
  });

  OvercompleteBasis local_basis;
  const OvercompleteBasis* basis = stage("basis", [&]() -> const OvercompleteBasis* {
    if (prebuilt) {
      if (!prebuilt->grid.same_lattice(grid))
        throw std::invalid_argument("prebuilt basis grid does not match the scenario grid");
      return prebuilt;
    }
    local_basis = build_basis(sc.geometry, sc.nominal, sc.descriptors, grid, sc.truncation);
    return &local_basis;
  });
  res.provenance = basis->provenance;

  const RestrictedBasis restricted = stage("measurements", [&] {
    res.probe_indices = measurement_indices(sc.measurements, grid);
    return restrict(*basis, res.probe_indices);
  });

  res.measurement = stage("noise", [&] {
    Eigen::VectorXcd clean(res.probe_indices.size());
    for (std::size_t m = 0; m < res.probe_indices.size(); ++m)
      clean[static_cast<int>(m)] = res.actual.values[res.probe_indices[m]];
    const std::optional<double> snr = overrides.snr_db ? overrides.snr_db : sc.snr_db;
    return add_noise(clean, snr, overrides.seed.value_or(sc.seed));
  });

  res.bcs = stage("bcs", [&] {
    BcsOptions opts = sc.bcs;
    if (overrides.estimate_noise) opts.estimate_noise = *overrides.estimate_noise;
    const double eta0 = overrides.eta0.value_or(sc.eta0);
    return solve_bcs(restricted, res.measurement.noisy, eta0, opts);
  });

  res.omp = stage("omp", [&] { return solve_omp(restricted, res.measurement.noisy, sc.omp); });

  stage("reconstruct", [&] {
    res.bcs_field = {grid, basis->matrix * res.bcs.w};
    res.omp_field = {grid, basis->matrix * res.omp.w};
    return 0;
  });

  stage("nf-ff", [&] {
    res.pattern_actual = nf_to_ff(res.actual);
    res.pattern_bcs = nf_to_ff(res.bcs_field);
    res.pattern_omp = nf_to_ff(res.omp_field);
    res.pattern_truncated = nf_to_ff(zero_fill_outside(res.actual, sc.measurements.side));
    return 0;
  });

  stage("metrics", [&] {
    res.bcs_report = make_error_report(res.actual, res.bcs_field, res.pattern_actual,
                                       res.pattern_bcs, res.bcs.w, basis->provenance,
                                       sc.bcs.zero_threshold);
    res.omp_report = make_error_report(res.actual, res.omp_field, res.pattern_actual,
                                       res.pattern_omp, res.omp.w, basis->provenance,
                                       sc.bcs.zero_threshold);
    return 0;
  });

  return res;
}

std::vector<Eta0SweepRow> sweep_eta0(const Scenario& sc, const std::vector<double>& eta0s,
                                     const std::vector<double>& snrs, int trials,
                                     const OvercompleteBasis* prebuilt) {
  if (eta0s.empty() || snrs.empty())
    throw std::invalid_argument("sweep_eta0: sweep lists must be non-empty");
  if (trials < 1) throw std::invalid_argument("sweep_eta0: trials must be >= 1");

  OvercompleteBasis local;
  if (!prebuilt) {
    local = build_scenario_basis(sc);
    prebuilt = &local;
  }

  std::vector<Eta0SweepRow> rows;
  for (std::size_t si = 0; si < snrs.size(); ++si) {
    std::vector<Eta0SweepRow> group;
    for (std::size_t ei = 0; ei < eta0s.size(); ++ei) {
      std::vector<double> xis;
      for (int trial = 0; trial < trials; ++trial) {
        RunOverrides ov;
        ov.snr_db = snrs[si];
        ov.seed = derive_seed(sc.seed, 0xE7A0 + si, static_cast<std::uint64_t>(trial));
        ov.eta0 = eta0s[ei];
        ov.estimate_noise = false;  // the initial guess is the object of study
        xis.push_back(run_experiment(sc, prebuilt, ov).bcs_report.xi_db);
      }
      group.push_back({eta0s[ei], snrs[si], median(xis), false});
    }
    std::size_t best = 0;
    for (std::size_t ei = 1; ei < group.size(); ++ei)
      if (group[ei].xi_db < group[best].xi_db) best = ei;
    group[best].argmin = true;
    rows.insert(rows.end(), group.begin(), group.end());
  }
  return rows;
}

std::vector<SnrSweepRow> sweep_snr(const Scenario& sc, const std::vector<double>& snrs,
                                   int trials, const OvercompleteBasis* prebuilt) {
  if (snrs.empty()) throw std::invalid_argument("sweep_snr: SNR list must be non-empty");
  if (trials < 1) throw std::invalid_argument("sweep_snr: trials must be >= 1");

  OvercompleteBasis local;
  if (!prebuilt) {
    local = build_scenario_basis(sc);
    prebuilt = &local;
  }

  std::vector<SnrSweepRow> rows;
  for (std::size_t si = 0; si < snrs.size(); ++si) {
    for (int trial = 0; trial < trials; ++trial) {
      RunOverrides ov;
      ov.snr_db = snrs[si];
      ov.seed = derive_seed(sc.seed, 0x5412 + si, static_cast<std::uint64_t>(trial));
      const ExperimentResult res = run_experiment(sc, prebuilt, ov);
      rows.push_back({snrs[si], trial, res.bcs_report.xi_db, res.omp_report.xi_db,
                      res.bcs_report.sparsity_l0, res.omp_report.sparsity_l0,
                      res.bcs_report.identified_factors});
    }
  }
  return rows;
}

TruncationSweep sweep_truncation(const Scenario& sc, const std::vector<double>& sides,
                                 int trials, const OvercompleteBasis* prebuilt) {
  if (sides.empty()) throw std::invalid_argument("sweep_truncation: side list must be non-empty");
  if (trials < 1) throw std::invalid_argument("sweep_truncation: trials must be >= 1");

  OvercompleteBasis local;
  if (!prebuilt) {
    local = build_scenario_basis(sc);
    prebuilt = &local;
  }

  TruncationSweep sweep;
  for (std::size_t sdi = 0; sdi < sides.size(); ++sdi) {
    Scenario shrunk = sc;
    shrunk.measurements.side = sides[sdi];
    shrunk.validate();
    for (int trial = 0; trial < trials; ++trial) {
      RunOverrides ov;
      ov.seed = derive_seed(sc.seed, 0x7C00 + sdi, static_cast<std::uint64_t>(trial));
      const ExperimentResult res = run_experiment(shrunk, prebuilt, ov);
      sweep.rows.push_back(
          {sides[sdi], trial, res.bcs_report.xi_db, res.omp_report.xi_db});
      if (trial == 0) {
        TruncationCut cut;
        const PatternCut actual = pattern_cut(res.pattern_actual, 0.0);
        cut.v = actual.v;
        cut.actual_db = actual.db;
        cut.truncated_db = pattern_cut(res.pattern_truncated, 0.0).db;
        cut.bcs_db = pattern_cut(res.pattern_bcs, 0.0).db;
        cut.omp_db = pattern_cut(res.pattern_omp, 0.0).db;
        sweep.cuts[sides[sdi]] = cut;
      }
    }
  }
  return sweep;
}

namespace {

json report_json(const ExperimentResult& res, const Scenario& sc) {
  auto solver_block = [&](const ErrorReport& rep) {
    json b;
    b["xi_db"] = rep.xi_db;
    b["max_nf_error_db"] = rep.max_nf_error_db;
    b["ff_max_dev_db"] = rep.ff_max_dev_db;
    b["sparsity_l0"] = rep.sparsity_l0;
    b["identified_factors"] = rep.identified_factors;
    return b;
  };

  json j;
  j["scenario"] = {
      {"seed", res.measurement.seed},
      {"snr_db", res.measurement.snr_db ? json(*res.measurement.snr_db) : json(nullptr)},
      {"eta0", sc.eta0},
      {"estimate_noise", sc.bcs.estimate_noise},
      {"prediction_grid", {{"side", sc.prediction_grid.side},
                           {"height", sc.prediction_grid.height},
                           {"step", sc.prediction_grid.step}}},
      {"measurements", {{"side", sc.measurements.side},
                        {"nx", sc.measurements.nx},
                        {"ny", sc.measurements.ny}}},
  };
  j["measurement"] = {
      {"count", static_cast<int>(res.probe_indices.size())},
      {"realized_snr_db", std::isfinite(res.measurement.realized_snr_db)
                              ? json(res.measurement.realized_snr_db)
                              : json(nullptr)},
  };
  j["bcs"] = solver_block(res.bcs_report);
  j["bcs"]["converged"] = res.bcs.converged;
  j["bcs"]["iterations"] = static_cast<int>(res.bcs.likelihood_trace.size()) - 1;
  j["bcs"]["active_set"] = res.bcs.active_set;
  j["omp"] = solver_block(res.omp_report);
  j["omp"]["selections"] = res.omp.active_set;
  return j;
}

void write_field_csv(const Eigen::VectorXd& db, const ScanGrid& grid,
                     const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  out << "x,y,db\n";
  for (int t = 0; t < db.size(); ++t) {
    const Eigen::Vector3d r = grid.point(t);
    out << format_double(r.x()) << ',' << format_double(r.y()) << ','
        << format_double(db[t]) << '\n';
  }
}

void write_pattern_csv(const FfDeviation& dev, const PowerPattern& ref,
                       const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  out << "u,v,db\n";
  const int nf = static_cast<int>(ref.u_axis.size());
  for (int q = 0; q < nf; ++q)
    for (int p = 0; p < nf; ++p)
      if (ref.visible(q, p))
        out << format_double(ref.u_axis[p]) << ',' << format_double(ref.v_axis[q]) << ','
            << format_double(dev.map_db(q, p)) << '\n';
}

}  // namespace

void export_results(const ExperimentResult& res, const Scenario& sc, const std::string& out_dir) {
  namespace fs = std::filesystem;
  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("export_results: cannot create " + dir.string());

  {
    std::ofstream out = open_out(dir / "report.json");
    out << report_json(res, sc).dump(2) << '\n';
  }

  write_field_csv(res.bcs_report.nf_error_map_db, res.actual.grid, dir / "nf_error_bcs.csv");
  write_field_csv(res.omp_report.nf_error_map_db, res.actual.grid, dir / "nf_error_omp.csv");
  write_pattern_csv(ff_deviation(res.pattern_actual, res.pattern_bcs), res.pattern_actual,
                    dir / "ff_error_bcs.csv");
  write_pattern_csv(ff_deviation(res.pattern_actual, res.pattern_omp), res.pattern_actual,
                    dir / "ff_error_omp.csv");

  {
    std::ofstream out = open_out(dir / "cut_u0.csv");
    out << "v,actual_db,truncated_db,bcs_db,omp_db\n";
    const PatternCut actual = pattern_cut(res.pattern_actual, 0.0);
    const PatternCut trunc = pattern_cut(res.pattern_truncated, 0.0);
    const PatternCut bcs = pattern_cut(res.pattern_bcs, 0.0);
    const PatternCut omp = pattern_cut(res.pattern_omp, 0.0);
    for (int i = 0; i < actual.v.size(); ++i)
      out << format_double(actual.v[i]) << ',' << format_double(actual.db[i]) << ','
          << format_double(trunc.db[i]) << ',' << format_double(bcs.db[i]) << ','
          << format_double(omp.db[i]) << '\n';
  }

  {
    std::ofstream out = open_out(dir / "coefficients.csv");
    out << "b,abs_bcs,abs_omp,factor,singular_index\n";
    for (int b = 0; b < res.bcs.w.size(); ++b)
      out << (b + 1) << ',' << format_double(std::abs(res.bcs.w[b])) << ','
          << format_double(std::abs(res.omp.w[b])) << ',' << res.provenance[b].factor << ','
          << res.provenance[b].singular_index << '\n';
  }

  {
    std::ofstream out = open_out(dir / "likelihood_trace.csv");
    out << "iteration,phi\n";
    for (std::size_t i = 0; i < res.bcs.likelihood_trace.size(); ++i)
      out << i << ',' << format_double(res.bcs.likelihood_trace[i]) << '\n';
  }
}

void write_eta0_csv(const std::vector<Eta0SweepRow>& rows, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "eta0,snr_db,xi_db,argmin\n";
  for (const Eta0SweepRow& r : rows)
    out << format_double(r.eta0) << ',' << format_double(r.snr_db) << ','
        << format_double(r.xi_db) << ',' << (r.argmin ? 1 : 0) << '\n';
}

void write_snr_csv(const std::vector<SnrSweepRow>& rows, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "snr_db,trial,xi_bcs_db,xi_omp_db,l0_bcs,l0_omp,factors_bcs\n";
  for (const SnrSweepRow& r : rows) {
    out << format_double(r.snr_db) << ',' << r.trial << ',' << format_double(r.xi_bcs_db) << ','
        << format_double(r.xi_omp_db) << ',' << r.l0_bcs << ',' << r.l0_omp << ',';
    for (std::size_t i = 0; i < r.factors_bcs.size(); ++i) {
      if (i) out << ';';
      out << r.factors_bcs[i];
    }
    out << '\n';
  }
}

void write_truncation_csv(const TruncationSweep& sweep, const std::string& out_dir) {
  namespace fs = std::filesystem;
  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("write_truncation_csv: cannot create " + dir.string());

  {
    std::ofstream out = open_out(dir / "truncation.csv");
    out << "side,trial,xi_bcs_db,xi_omp_db\n";
    for (const TruncationRow& r : sweep.rows)
      out << format_double(r.side) << ',' << r.trial << ',' << format_double(r.xi_bcs_db) << ','
          << format_double(r.xi_omp_db) << '\n';
  }
  for (const auto& [side, cut] : sweep.cuts) {
    std::ofstream out = open_out(dir / ("cut_u0_L" + format_double(side) + ".csv"));
    out << "v,actual_db,truncated_db,bcs_db,omp_db\n";
    for (int i = 0; i < cut.v.size(); ++i)
      out << format_double(cut.v[i]) << ',' << format_double(cut.actual_db[i]) << ','
          << format_double(cut.truncated_db[i]) << ',' << format_double(cut.bcs_db[i]) << ','
          << format_double(cut.omp_db[i]) << '\n';
  }
}

}  // namespace mebd

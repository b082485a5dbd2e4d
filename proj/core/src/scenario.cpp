#include "mebd/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace mebd {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw validation_error(path + ": " + msg);
}

double require_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

int require_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

ElementModel parse_element_model(const std::string& name, const std::string& path) {
  if (name == "isotropic") return ElementModel::isotropic;
  if (name == "cosine") return ElementModel::cosine;
  if (name == "short-dipole" || name == "short_dipole") return ElementModel::short_dipole;
  fail(path, "unknown element model '" + name + "'");
}

UncertaintyKind parse_kind(const std::string& name, const std::string& path) {
  if (name == "magnitude") return UncertaintyKind::magnitude;
  if (name == "phase") return UncertaintyKind::phase;
  fail(path, "unknown uncertainty kind '" + name + "'");
}

Eigen::VectorXcd parse_complex_list(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of [re, im] pairs");
  Eigen::VectorXcd out(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    const json& e = j[i];
    if (!e.is_array() || e.size() != 2) fail(path, "entry " + std::to_string(i) + " is not [re, im]");
    out[static_cast<int>(i)] = Complex(e[0].get<double>(), e[1].get<double>());
  }
  return out;
}

}  // namespace

const UncertaintyDescriptor& Scenario::descriptor_by_id(int id) const {
  for (const UncertaintyDescriptor& d : descriptors)
    if (d.index == id) return d;
  throw validation_error("scenario: no descriptor with id " + std::to_string(id));
}

void Scenario::validate() const {
  geometry.validate();
  const int s = geometry.cluster_count();
  if (nominal.values.size() != s)
    throw validation_error("nominal_excitations: length must equal the cluster count");
  if (descriptors.empty()) throw validation_error("descriptors: at least one is required");

  std::set<int> ids;
  for (const UncertaintyDescriptor& d : descriptors) {
    d.validate();
    if (d.target_cluster >= s) throw validation_error("descriptors: cluster index out of range");
    if (!ids.insert(d.index).second)
      throw validation_error("descriptors: duplicate descriptor id " + std::to_string(d.index));
  }
  for (const TruthPerturbation& p : truth_perturbations) {
    const UncertaintyDescriptor& d = descriptor_by_id(p.descriptor);
    if (p.value < d.range_min - 1e-12 || p.value > d.range_max + 1e-12)
      throw validation_error("truth_perturbations: value outside the descriptor range");
  }

  if (!(prediction_grid.side > 0.0) || !(prediction_grid.step > 0.0))
    throw validation_error("prediction_grid: side and step must be positive");
  if (measurements.side > prediction_grid.side + 1e-12)
    throw validation_error("measurements.side: exceeds prediction_grid.side");
  if (measurements.nx < 1 || measurements.ny < 1)
    throw validation_error("measurements: counts must be >= 1");
  if (!(eta0 > 0.0)) throw validation_error("eta0: must be positive");
}

Scenario scenario_from_json(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw validation_error(origin + ": " + e.what());
  }

  Scenario sc;
  try {
    const json& g = j.at("geometry");
    sc.geometry.nx = require_int(g.at("nx"), "geometry.nx");
    sc.geometry.ny = require_int(g.at("ny"), "geometry.ny");
    sc.geometry.spacing = require_number(g.at("spacing"), "geometry.spacing");
    sc.geometry.element = parse_element_model(g.value("element", "cosine"), "geometry.element");
    if (!g.contains("clusters") || (g.at("clusters").is_string() && g.at("clusters") == "rows")) {
      sc.geometry = ArrayGeometry::row_clusters(sc.geometry.nx, sc.geometry.ny,
                                                sc.geometry.spacing, sc.geometry.element);
    } else {
      const json& cm = g.at("clusters");
      if (!cm.is_array()) fail("geometry.clusters", "expected \"rows\" or an array");
      for (const json& e : cm) sc.geometry.cluster_map.push_back(e.get<int>() - 1);  // 1-based in file
    }

    const int s = sc.geometry.cluster_count();
    if (j.contains("nominal_excitations"))
      sc.nominal.values = parse_complex_list(j.at("nominal_excitations"), "nominal_excitations");
    else
      sc.nominal.values = Eigen::VectorXcd::Ones(s);

    if (!j.contains("descriptors") || !j.at("descriptors").is_array())
      fail("descriptors", "expected an array");
    for (std::size_t i = 0; i < j.at("descriptors").size(); ++i) {
      const json& d = j.at("descriptors")[i];
      const std::string path = "descriptors[" + std::to_string(i) + "]";
      UncertaintyDescriptor desc;
      desc.index = require_int(d.at("index"), path + ".index");
      desc.kind = parse_kind(d.at("kind").get<std::string>(), path + ".kind");
      desc.target_cluster = require_int(d.at("cluster"), path + ".cluster") - 1;  // 1-based in file
      const json& r = d.at("range");
      if (!r.is_array() || r.size() != 2) fail(path + ".range", "expected [min, max]");
      desc.range_min = r[0].get<double>();
      desc.range_max = r[1].get<double>();
      desc.samples = d.value("samples", 7);
      sc.descriptors.push_back(desc);
    }

    if (j.contains("truth_perturbations"))
      for (const json& p : j.at("truth_perturbations"))
        sc.truth_perturbations.push_back(
            {require_int(p.at("descriptor"), "truth_perturbations.descriptor"),
             require_number(p.at("value"), "truth_perturbations.value")});

    const json& pg = j.at("prediction_grid");
    sc.prediction_grid.side = require_number(pg.at("side"), "prediction_grid.side");
    sc.prediction_grid.height = require_number(pg.at("height"), "prediction_grid.height");
    sc.prediction_grid.step = pg.value("step", 0.5);

    const json& ms = j.at("measurements");
    sc.measurements.side = require_number(ms.at("side"), "measurements.side");
    sc.measurements.nx = require_int(ms.at("nx"), "measurements.nx");
    sc.measurements.ny = require_int(ms.at("ny"), "measurements.ny");

    if (j.contains("snr_db") && !j.at("snr_db").is_null()) {
      if (j.at("snr_db").is_array())
        for (const json& e : j.at("snr_db")) sc.snr_sweep.push_back(e.get<double>());
      else
        sc.snr_db = require_number(j.at("snr_db"), "snr_db");
    }
    if (j.contains("eta0")) {
      if (j.at("eta0").is_array()) {
        for (const json& e : j.at("eta0")) sc.eta0_sweep.push_back(e.get<double>());
        if (!sc.eta0_sweep.empty()) sc.eta0 = sc.eta0_sweep.front();
      } else {
        sc.eta0 = require_number(j.at("eta0"), "eta0");
      }
    }
    sc.seed = j.value("seed", std::uint64_t{0});

    if (j.contains("solver")) {
      const json& sv = j.at("solver");
      if (sv.contains("bcs")) {
        const json& b = sv.at("bcs");
        sc.bcs.estimate_noise = b.value("estimate_noise", sc.bcs.estimate_noise);
        sc.bcs.tol_phi = b.value("tol_phi", sc.bcs.tol_phi);
        sc.bcs.max_iter = b.value("max_iter", sc.bcs.max_iter);
        sc.bcs.zero_threshold = b.value("zero_threshold", sc.bcs.zero_threshold);
      }
      if (sv.contains("omp")) {
        const json& o = sv.at("omp");
        sc.omp.residual_tol = o.value("residual_tol", sc.omp.residual_tol);
        sc.omp.max_sparsity = o.value("max_sparsity", sc.omp.max_sparsity);
      }
    }
    sc.bcs.eta0 = sc.eta0;

    if (j.contains("basis") && j.at("basis").contains("truncation")) {
      const json& t = j.at("basis").at("truncation");
      const std::string mode = t.value("mode", "fixed");
      if (mode == "fixed")
        sc.truncation = TruncationRule::fixed(t.value("q", 2));
      else if (mode == "threshold")
        sc.truncation = TruncationRule::threshold(t.value("epsilon", 1e-3));
      else
        fail("basis.truncation.mode", "expected \"fixed\" or \"threshold\"");
    }
  } catch (const json::exception& e) {
    throw validation_error(origin + ": " + e.what());
  }

  sc.validate();
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error(path + ": cannot open scenario file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return scenario_from_json(buf.str(), path);
}

}  // namespace mebd

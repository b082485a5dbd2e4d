#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mebd/basis.hpp"
#include "mebd/bcs.hpp"
#include "mebd/omp.hpp"

namespace mebd {

struct GridSpec {
  double side = 0.0;
  double height = 0.0;
  double step = 0.5;
};

/// Probing sub-lattice: nx x ny positions uniformly spread over a centered
/// square of the given side; every node must coincide with a prediction-grid
/// node.
struct MeasurementSpec {
  double side = 0.0;
  int nx = 0;
  int ny = 0;
};

/// One deviation of the actual antenna from the nominal one, expressed as a
/// value of a declared uncertainty descriptor.
struct TruthPerturbation {
  int descriptor = 0;  // descriptor id
  double value = 0.0;
};

/// Full experiment description, loadable from JSON.
struct Scenario {
  ArrayGeometry geometry;
  ExcitationVector nominal;
  std::vector<UncertaintyDescriptor> descriptors;
  std::vector<TruthPerturbation> truth_perturbations;
  GridSpec prediction_grid;
  MeasurementSpec measurements;
  std::optional<double> snr_db;     // nullopt -> noiseless
  std::vector<double> snr_sweep;    // optional list for sweep commands
  double eta0 = 1e-2;
  std::vector<double> eta0_sweep;   // optional list for sweep commands
  std::uint64_t seed = 0;
  BcsOptions bcs;
  OmpOptions omp;
  TruncationRule truncation;

  const UncertaintyDescriptor& descriptor_by_id(int id) const;
  void validate() const;  // throws validation_error with a field path
};

Scenario load_scenario(const std::string& path);
Scenario scenario_from_json(const std::string& text, const std::string& origin);

}  // namespace mebd

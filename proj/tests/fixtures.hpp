#pragma once

#include <string>

#include "mebd/pipeline.hpp"

namespace fixtures {

inline const mebd::Scenario& benchmark_scenario() {
  static const mebd::Scenario sc =
      mebd::load_scenario(std::string(MEBD_SCENARIO_DIR) + "/benchmark.json");
  return sc;
}

// Built once; the basis only depends on geometry, descriptors and grid.
inline const mebd::OvercompleteBasis& benchmark_basis() {
  static const mebd::OvercompleteBasis basis =
      mebd::build_scenario_basis(benchmark_scenario());
  return basis;
}

}  // namespace fixtures

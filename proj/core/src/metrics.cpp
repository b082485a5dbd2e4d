#include "mebd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace mebd {

namespace {

void check_same_grid(const FieldMap& a, const FieldMap& b, const char* who) {
  if (!a.grid.same_lattice(b.grid))
    throw std::invalid_argument(std::string(who) + ": field maps live on different grids");
}

}  // namespace

double integral_error(const FieldMap& actual, const FieldMap& estimated) {
  check_same_grid(actual, estimated, "integral_error");
  const double denom = actual.values.squaredNorm();
  if (denom == 0.0) throw degenerate_input("integral_error: reference field is zero");
  return (estimated.values - actual.values).squaredNorm() / denom;
}

Eigen::VectorXd nf_error_map(const FieldMap& actual, const FieldMap& estimated) {
  check_same_grid(actual, estimated, "nf_error_map");
  const double peak = actual.values.cwiseAbs().maxCoeff();
  if (peak == 0.0) throw degenerate_input("nf_error_map: reference field is zero");
  Eigen::VectorXd out(actual.values.size());
  for (int t = 0; t < actual.values.size(); ++t) {
    const double dev = std::abs(estimated.values[t] - actual.values[t]) / peak;
    out[t] = dev > 0.0 ? std::max(20.0 * std::log10(dev), kDbFloor) : kDbFloor;
  }
  return out;
}

FfDeviation ff_deviation(const PowerPattern& actual, const PowerPattern& estimated) {
  if (actual.u_axis.size() != estimated.u_axis.size() ||
      (actual.u_axis - estimated.u_axis).cwiseAbs().maxCoeff() > 1e-12 ||
      (actual.visible != estimated.visible).any())
    throw std::invalid_argument("ff_deviation: patterns live on different lattices");

  const int nf = static_cast<int>(actual.u_axis.size());
  FfDeviation dev;
  dev.map_db.resize(nf, nf);
  dev.max_db = kDbFloor;
  for (int q = 0; q < nf; ++q) {
    for (int p = 0; p < nf; ++p) {
      if (!actual.visible(q, p)) {
        dev.map_db(q, p) = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      const double pa = std::pow(10.0, actual.values_db(q, p) / 10.0);
      const double pe = std::pow(10.0, estimated.values_db(q, p) / 10.0);
      dev.map_db(q, p) = to_db_power(std::abs(pa - pe));
      dev.max_db = std::max(dev.max_db, dev.map_db(q, p));
    }
  }
  return dev;
}

int count_nonzero(const Eigen::VectorXcd& w, double zero_threshold) {
  if (w.size() == 0) return 0;
  const double peak = w.cwiseAbs().maxCoeff();
  if (peak == 0.0) return 0;
  int n = 0;
  for (int b = 0; b < w.size(); ++b)
    if (std::abs(w[b]) > zero_threshold * peak) ++n;
  return n;
}

std::vector<int> identify_defects(const Eigen::VectorXcd& w,
                                  const std::vector<BasisColumnInfo>& provenance,
                                  double zero_threshold) {
  if (static_cast<int>(provenance.size()) != w.size())
    throw std::invalid_argument("identify_defects: provenance does not cover every column");
  std::set<int> factors;
  if (w.size() > 0) {
    const double peak = w.cwiseAbs().maxCoeff();
    if (peak > 0.0)
      for (int b = 0; b < w.size(); ++b)
        if (std::abs(w[b]) > zero_threshold * peak) factors.insert(provenance[b].factor);
  }
  return {factors.begin(), factors.end()};
}

ErrorReport make_error_report(const FieldMap& actual, const FieldMap& estimated,
                              const PowerPattern& actual_pattern,
                              const PowerPattern& estimated_pattern,
                              const Eigen::VectorXcd& w,
                              const std::vector<BasisColumnInfo>& provenance,
                              double zero_threshold) {
  ErrorReport rep;
  rep.xi_db = to_db_power(integral_error(actual, estimated));
  rep.nf_error_map_db = nf_error_map(actual, estimated);
  rep.max_nf_error_db = rep.nf_error_map_db.maxCoeff();
  rep.ff_max_dev_db = ff_deviation(actual_pattern, estimated_pattern).max_db;
  rep.sparsity_l0 = count_nonzero(w, zero_threshold);
  rep.identified_factors = identify_defects(w, provenance, zero_threshold);
  return rep;
}

}  // namespace mebd

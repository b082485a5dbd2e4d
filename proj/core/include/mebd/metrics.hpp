#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Core>

#include "mebd/basis.hpp"
#include "mebd/nf_ff.hpp"

namespace mebd {

/// Every dB map is floored here so exported files stay finite.
inline constexpr double kDbFloor = -120.0;

/// Energy-normalized squared reconstruction error
///   Xi = sum_t |E - E_est|^2 / sum_t |E|^2.
double integral_error(const FieldMap& actual, const FieldMap& estimated);

inline double to_db_power(double linear) {
  return linear > 0.0 ? std::max(10.0 * std::log10(linear), kDbFloor) : kDbFloor;
}

/// Per-point |E_est - E| / max|E| in dB (field quantity, 20 log10).
Eigen::VectorXd nf_error_map(const FieldMap& actual, const FieldMap& estimated);

struct FfDeviation {
  Eigen::MatrixXd map_db;  // NaN where invisible
  double max_db = kDbFloor;
};

/// Absolute difference of the peak-normalized linear power patterns, in dB,
/// with its maximum over the visible region.
FfDeviation ff_deviation(const PowerPattern& actual, const PowerPattern& estimated);

/// Number of coefficients above the relative zero threshold.
int count_nonzero(const Eigen::VectorXcd& w, double zero_threshold);

/// Sorted unique factor ids owning at least one non-null coefficient.
std::vector<int> identify_defects(const Eigen::VectorXcd& w,
                                  const std::vector<BasisColumnInfo>& provenance,
                                  double zero_threshold);

struct ErrorReport {
  double xi_db = 0.0;
  Eigen::VectorXd nf_error_map_db;
  double max_nf_error_db = kDbFloor;
  double ff_max_dev_db = kDbFloor;
  int sparsity_l0 = 0;
  std::vector<int> identified_factors;
};

ErrorReport make_error_report(const FieldMap& actual, const FieldMap& estimated,
                              const PowerPattern& actual_pattern,
                              const PowerPattern& estimated_pattern,
                              const Eigen::VectorXcd& w,
                              const std::vector<BasisColumnInfo>& provenance,
                              double zero_threshold);

}  // namespace mebd

#pragma once

#include <Eigen/Core>

#include "mebd/forward_model.hpp"

namespace mebd {

/// Centered (fftshifted) 2-D spectrum of a zero-padded field map:
///   amplitude(q, p) = sum_{iy, ix} E(ix, iy) exp(+j 2 pi (p' ix + q' iy) / N)
/// with p', q' the centered bin indices, N = points_per_axis * pad_factor.
/// Direction cosines: u = p' / (N * step), v = q' / (N * step), lambda = 1.
struct AngularSpectrum {
  Eigen::VectorXd u_axis;
  Eigen::VectorXd v_axis;
  Eigen::MatrixXcd amplitude;  // row q <-> v, column p <-> u
};

AngularSpectrum plane_wave_spectrum(const FieldMap& field, int pad_factor);

/// Peak-normalized power pattern over the visible region u^2 + v^2 <= 1.
/// Entries outside the visible region are invalid and must not be compared.
struct PowerPattern {
  Eigen::VectorXd u_axis;
  Eigen::VectorXd v_axis;
  Eigen::MatrixXd values_db;  // 10 log10(P / P_peak), floored; NaN where invisible
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> visible;
};

/// Plane-wave-spectrum transform of a tangential field map. The optional
/// obliquity flag weights the power by cos^2(theta) for physical-pattern
/// studies; comparisons between fields use the same operator either way.
PowerPattern nf_to_ff(const FieldMap& field, int pad_factor = 4, bool obliquity = false);

struct PatternCut {
  double u0 = 0.0;             // nearest grid line actually used
  Eigen::VectorXd v;
  Eigen::VectorXd db;
};

PatternCut pattern_cut(const PowerPattern& pattern, double u0);

/// Copy of the field with samples outside the centered square of the given
/// side zeroed; feeds the truncated-scan pattern through the same transform.
FieldMap zero_fill_outside(const FieldMap& field, double side);

}  // namespace mebd

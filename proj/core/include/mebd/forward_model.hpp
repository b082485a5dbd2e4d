#pragma once

#include <complex>
#include <numbers>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "mebd/errors.hpp"

namespace mebd {

using Complex = std::complex<double>;

// All lengths are expressed in free-space wavelengths (lambda = 1).
inline constexpr double kWaveNumber = 2.0 * std::numbers::pi;

/// Analytic element factor used in place of a full-wave radiator model.
enum class ElementModel { isotropic, cosine, short_dipole };

/// Planar array on the z = 0 plane, elements on a rectangular lattice,
/// grouped into excitation clusters (by default one cluster per row).
struct ArrayGeometry {
  int nx = 1;
  int ny = 1;
  double spacing = 0.5;            // inter-element pitch [lambda]
  std::vector<int> cluster_map;    // element n = iy*nx + ix -> cluster id, zero-based
  ElementModel element = ElementModel::cosine;

  int element_count() const { return nx * ny; }
  int cluster_count() const;
  Eigen::Vector3d element_position(int n) const;
  void validate() const;

  /// Row-per-cluster layout: cluster of element (ix, iy) is iy.
  static ArrayGeometry row_clusters(int nx, int ny, double spacing,
                                    ElementModel element = ElementModel::cosine);
};

/// Per-cluster complex excitations.
struct ExcitationVector {
  Eigen::VectorXcd values;
};

/// Regular square lattice on the plane z = height, centered on the array axis.
/// Point ordering is row-major with x fastest: t = iy * points_per_axis + ix,
/// and lattice index (0, 0) sits at the (-side/2, -side/2) corner.
struct ScanGrid {
  double side = 0.0;
  double height = 0.0;
  double step = 0.0;
  int points_per_axis = 0;

  int point_count() const { return points_per_axis * points_per_axis; }
  double coordinate(int i) const { return -0.5 * side + i * step; }
  int index(int ix, int iy) const { return iy * points_per_axis + ix; }
  std::pair<int, int> coords(int t) const {
    return {t % points_per_axis, t / points_per_axis};
  }
  Eigen::Vector3d point(int t) const {
    auto [ix, iy] = coords(t);
    return {coordinate(ix), coordinate(iy), height};
  }
  bool same_lattice(const ScanGrid& other) const;
};

ScanGrid build_grid(double side, double height, double step);

/// Complex samples of the x-polarized tangential field on a scan grid.
struct FieldMap {
  ScanGrid grid;
  Eigen::VectorXcd values;  // length grid.point_count()
};

/// Coherent superposition of per-element spherical waves:
///   E(r) = sum_n zeta[cluster(n)] * f(theta_n) * exp(-j k |r - p_n|) / |r - p_n|.
/// Linear in the excitation vector.
FieldMap radiate(const ArrayGeometry& geom, const ExcitationVector& exc,
                 const ScanGrid& grid);

enum class UncertaintyKind { magnitude, phase };

/// One uncertainty factor: a magnitude or phase deviation of a single
/// cluster excitation, with its admissible range and sweep sample count.
struct UncertaintyDescriptor {
  int index = 0;           // user-facing factor id c
  UncertaintyKind kind = UncertaintyKind::magnitude;
  int target_cluster = 0;  // zero-based
  double range_min = 0.0;
  double range_max = 1.0;
  int samples = 2;         // K_c
  void validate() const;
};

/// Copy of `nominal` with the targeted cluster's magnitude or phase
/// overwritten by `value`; every other entry is untouched.
ExcitationVector apply_uncertainty(const ExcitationVector& nominal,
                                   const UncertaintyDescriptor& descriptor,
                                   double value);

}  // namespace mebd

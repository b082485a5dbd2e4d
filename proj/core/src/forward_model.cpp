#include "mebd/forward_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

namespace mebd {

int ArrayGeometry::cluster_count() const {
  if (cluster_map.empty()) return 0;
  return *std::max_element(cluster_map.begin(), cluster_map.end()) + 1;
}

Eigen::Vector3d ArrayGeometry::element_position(int n) const {
  const int ix = n % nx;
  const int iy = n / nx;
  return {(ix - 0.5 * (nx - 1)) * spacing, (iy - 0.5 * (ny - 1)) * spacing, 0.0};
}

void ArrayGeometry::validate() const {
  if (nx < 1 || ny < 1) throw std::invalid_argument("array geometry: element counts must be >= 1");
  if (!(spacing > 0.0)) throw std::invalid_argument("array geometry: spacing must be positive");
  if (static_cast<int>(cluster_map.size()) != element_count())
    throw std::invalid_argument("array geometry: cluster map must cover every element");
  const int s = cluster_count();
  std::vector<char> seen(s, 0);
  for (int c : cluster_map) {
    if (c < 0 || c >= s) throw std::invalid_argument("array geometry: cluster id out of range");
    seen[c] = 1;
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end())
    throw std::invalid_argument("array geometry: every cluster must own at least one element");
}

ArrayGeometry ArrayGeometry::row_clusters(int nx, int ny, double spacing, ElementModel element) {
  ArrayGeometry g;
  g.nx = nx;
  g.ny = ny;
  g.spacing = spacing;
  g.element = element;
  g.cluster_map.resize(static_cast<std::size_t>(nx) * ny);
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) g.cluster_map[iy * nx + ix] = iy;
  g.validate();
  return g;
}

bool ScanGrid::same_lattice(const ScanGrid& other) const {
  return side == other.side && height == other.height && step == other.step &&
         points_per_axis == other.points_per_axis;
}

ScanGrid build_grid(double side, double height, double step) {
  if (!(side > 0.0)) throw std::invalid_argument("build_grid: side must be positive");
  if (!(step > 0.0)) throw std::invalid_argument("build_grid: step must be positive");
  const double ratio = side / step;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio))
    throw std::invalid_argument("build_grid: side must be an integer multiple of step");
  ScanGrid g;
  g.side = side;
  g.height = height;
  g.step = step;
  g.points_per_axis = static_cast<int>(rounded) + 1;
  return g;
}

namespace {

double element_factor(ElementModel model, const Eigen::Vector3d& direction, double distance) {
  switch (model) {
    case ElementModel::isotropic:
      return 1.0;
    case ElementModel::cosine:
      return std::max(direction.z() / distance, 0.0);
    case ElementModel::short_dipole: {
      const double cx = direction.x() / distance;
      return std::sqrt(std::max(0.0, 1.0 - cx * cx));
    }
  }
  return 1.0;
}

}  // namespace

FieldMap radiate(const ArrayGeometry& geom, const ExcitationVector& exc, const ScanGrid& grid) {
  geom.validate();
  if (exc.values.size() != geom.cluster_count())
    throw std::invalid_argument("radiate: excitation length must equal the cluster count");

  const int n_elem = geom.element_count();
  std::vector<Eigen::Vector3d> positions(n_elem);
  for (int n = 0; n < n_elem; ++n) positions[n] = geom.element_position(n);

  FieldMap out;
  out.grid = grid;
  out.values.resize(grid.point_count());
  for (int t = 0; t < grid.point_count(); ++t) {
    const Eigen::Vector3d r = grid.point(t);
    Complex acc(0.0, 0.0);
    for (int n = 0; n < n_elem; ++n) {
      const Eigen::Vector3d d = r - positions[n];
      const double dist = d.norm();
      if (dist < 1e-12)
        throw std::invalid_argument("radiate: scan point coincides with an array element");
      const double f = element_factor(geom.element, d, dist);
      acc += exc.values[geom.cluster_map[n]] *
             (f / dist) * std::polar(1.0, -kWaveNumber * dist);
    }
    if (!std::isfinite(acc.real()) || !std::isfinite(acc.imag()))
      throw degenerate_input("radiate: non-finite field sample");
    out.values[t] = acc;
  }
  return out;
}

void UncertaintyDescriptor::validate() const {
  if (!(range_min < range_max))
    throw std::invalid_argument("uncertainty descriptor: range must satisfy min < max");
  if (samples < 2) throw std::invalid_argument("uncertainty descriptor: needs at least 2 samples");
  if (target_cluster < 0)
    throw std::invalid_argument("uncertainty descriptor: negative cluster index");
}

ExcitationVector apply_uncertainty(const ExcitationVector& nominal,
                                   const UncertaintyDescriptor& descriptor, double value) {
  descriptor.validate();
  if (descriptor.target_cluster >= nominal.values.size())
    throw std::invalid_argument("apply_uncertainty: cluster index out of range");
  if (value < descriptor.range_min - 1e-12 || value > descriptor.range_max + 1e-12)
    throw std::invalid_argument("apply_uncertainty: value outside the descriptor range");

  ExcitationVector out = nominal;
  Complex& z = out.values[descriptor.target_cluster];
  if (descriptor.kind == UncertaintyKind::magnitude)
    z = std::polar(value, std::arg(z));
  else
    z = std::polar(std::abs(z), value);
  return out;
}

}  // namespace mebd

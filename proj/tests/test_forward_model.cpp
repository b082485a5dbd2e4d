#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "mebd/forward_model.hpp"

using namespace mebd;

namespace {

double cdist(const Complex& a, const Complex& b) { return std::abs(a - b); }

}  // namespace

TEST_CASE("build_grid: half-wavelength sampling of a 20-lambda plane gives 41x41 points") {
  const ScanGrid g = build_grid(20.0, 7.0, 0.5);
  CHECK(g.points_per_axis == 41);
  CHECK(g.point_count() == 1681);
  CHECK(g.point(0).x() == doctest::Approx(-10.0));
  CHECK(g.point(0).y() == doctest::Approx(-10.0));
  CHECK(g.point(0).z() == doctest::Approx(7.0));
}

TEST_CASE("build_grid: minimal 2x2 lattice") {
  const ScanGrid g = build_grid(0.5, 1.0, 0.5);
  CHECK(g.point_count() == 4);
}

TEST_CASE("build_grid: point count matches direct lattice enumeration") {
  const ScanGrid g = build_grid(12.0, 7.0, 0.5);
  int per_axis = 0;
  for (double x = -6.0; x <= 6.0 + 1e-12; x += 0.5) ++per_axis;
  CHECK(g.points_per_axis == per_axis);
  CHECK(g.point_count() == per_axis * per_axis);
  CHECK(g.point_count() == 625);
}

TEST_CASE("build_grid: rejects bad inputs") {
  CHECK_THROWS_AS(build_grid(-1.0, 7.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(20.0, 7.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(1.3, 7.0, 0.5), std::invalid_argument);
}

TEST_CASE("grid ordering: x runs fastest and index round-trips") {
  const ScanGrid g = build_grid(3.0, 5.0, 0.5);
  CHECK(g.point(1).x() - g.point(0).x() == doctest::Approx(0.5));
  CHECK(g.point(1).y() == g.point(0).y());
  for (int t = 0; t < g.point_count(); ++t) {
    auto [ix, iy] = g.coords(t);
    CHECK(g.index(ix, iy) == t);
  }
}

TEST_CASE("radiate: single isotropic element, on-axis sample") {
  const ArrayGeometry geom = ArrayGeometry::row_clusters(1, 1, 0.5, ElementModel::isotropic);
  const ScanGrid g = build_grid(1.0, 7.0, 0.5);
  ExcitationVector exc{Eigen::VectorXcd::Ones(1)};
  const FieldMap f = radiate(geom, exc, g);
  const Complex center = f.values[g.index(1, 1)];
  // distance is exactly 7 lambda: |E| = 1/7, phase -14*pi wraps to zero
  CHECK(cdist(center, Complex(1.0 / 7.0, 0.0)) < 1e-12);
}

TEST_CASE("radiate: symmetric array gives mirror-symmetric field") {
  const ArrayGeometry geom = ArrayGeometry::row_clusters(4, 6, 0.5, ElementModel::cosine);
  const ScanGrid g = build_grid(4.0, 3.0, 0.5);
  ExcitationVector exc{Eigen::VectorXcd::Ones(6)};
  const FieldMap f = radiate(geom, exc, g);
  const int n = g.points_per_axis;
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const Complex a = f.values[g.index(ix, iy)];
      CHECK(cdist(a, f.values[g.index(n - 1 - ix, iy)]) < 1e-13 * std::abs(a) + 1e-15);
      CHECK(cdist(a, f.values[g.index(ix, n - 1 - iy)]) < 1e-13 * std::abs(a) + 1e-15);
    }
}

TEST_CASE("radiate: broadside pair matches a two-term hand sum") {
  const ArrayGeometry geom = ArrayGeometry::row_clusters(2, 1, 0.5, ElementModel::isotropic);
  const double h = 1000.0;
  const ScanGrid g = build_grid(1.0, h, 0.5);
  ExcitationVector exc{Eigen::VectorXcd::Ones(1)};
  const FieldMap f = radiate(geom, exc, g);
  const Complex center = f.values[g.index(1, 1)];

  const double r = std::sqrt(h * h + 0.25 * 0.25);
  const Complex expected = 2.0 * std::polar(1.0 / r, -kWaveNumber * r);
  CHECK(cdist(center, expected) < 1e-14);
  CHECK(std::abs(center) == doctest::Approx(2.0 / h).epsilon(1e-4));
}

TEST_CASE("radiate: linear in the excitation vector") {
  const ArrayGeometry geom = ArrayGeometry::row_clusters(3, 2, 0.5, ElementModel::cosine);
  const ScanGrid g = build_grid(2.0, 4.0, 0.5);
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXcd e1(2), e2(2);
  for (int s = 0; s < 2; ++s) {
    e1[s] = Complex(u(rng), u(rng));
    e2[s] = Complex(u(rng), u(rng));
  }
  const Complex alpha(0.7, -0.3), beta(-1.2, 0.4);
  const FieldMap fa = radiate(geom, {alpha * e1 + beta * e2}, g);
  const FieldMap f1 = radiate(geom, {e1}, g);
  const FieldMap f2 = radiate(geom, {e2}, g);
  const Eigen::VectorXcd combo = alpha * f1.values + beta * f2.values;
  CHECK((fa.values - combo).norm() < 1e-12 * combo.norm());
}

TEST_CASE("radiate: field decays with standoff height") {
  const ArrayGeometry geom = ArrayGeometry::row_clusters(4, 4, 0.5, ElementModel::cosine);
  ExcitationVector exc{Eigen::VectorXcd::Ones(4)};
  const FieldMap near = radiate(geom, exc, build_grid(8.0, 7.0, 0.5));
  const FieldMap far = radiate(geom, exc, build_grid(8.0, 14.0, 0.5));
  CHECK(far.values.cwiseAbs().maxCoeff() < near.values.cwiseAbs().maxCoeff());
}

TEST_CASE("radiate: element factors weigh oblique directions differently") {
  const ScanGrid g = build_grid(8.0, 2.0, 0.5);
  ExcitationVector exc{Eigen::VectorXcd::Ones(1)};
  const FieldMap iso =
      radiate(ArrayGeometry::row_clusters(1, 1, 0.5, ElementModel::isotropic), exc, g);
  const FieldMap cos_f =
      radiate(ArrayGeometry::row_clusters(1, 1, 0.5, ElementModel::cosine), exc, g);
  const FieldMap dip =
      radiate(ArrayGeometry::row_clusters(1, 1, 0.5, ElementModel::short_dipole), exc, g);

  const int center = g.index(8, 8);
  const int edge_x = g.index(0, 8);  // oblique along x
  const int edge_y = g.index(8, 0);  // oblique along y

  // on axis all factors are unity
  CHECK(std::abs(cos_f.values[center] - iso.values[center]) < 1e-14);
  CHECK(std::abs(dip.values[center] - iso.values[center]) < 1e-14);
  // cosine tapers any oblique direction
  CHECK(std::abs(cos_f.values[edge_x]) < std::abs(iso.values[edge_x]));
  // an x-directed short dipole tapers x-oblique directions but not y-oblique ones
  CHECK(std::abs(dip.values[edge_x]) < 0.95 * std::abs(iso.values[edge_x]));
  CHECK(std::abs(dip.values[edge_y]) == doctest::Approx(std::abs(iso.values[edge_y])));
}

TEST_CASE("radiate: excitation length must match the cluster count") {
  const ArrayGeometry geom = ArrayGeometry::row_clusters(2, 2, 0.5);
  CHECK_THROWS_AS(radiate(geom, {Eigen::VectorXcd::Ones(3)}, build_grid(1.0, 2.0, 0.5)),
                  std::invalid_argument);
}

TEST_CASE("apply_uncertainty: magnitude and phase overwrite a single cluster") {
  ExcitationVector nominal{Eigen::VectorXcd::Ones(10)};

  UncertaintyDescriptor mag{3, UncertaintyKind::magnitude, 2, 0.0, 1.0, 7};
  const ExcitationVector dropped = apply_uncertainty(nominal, mag, 0.45);
  CHECK(dropped.values[2] == Complex(0.45, 0.0));
  for (int s = 0; s < 10; ++s)
    if (s != 2) CHECK(dropped.values[s] == Complex(1.0, 0.0));

  UncertaintyDescriptor ph{13, UncertaintyKind::phase, 2,
                           -std::numbers::pi, std::numbers::pi, 7};
  const double third = std::numbers::pi / 3.0;
  const ExcitationVector rotated = apply_uncertainty(nominal, ph, third);
  CHECK(cdist(rotated.values[2], std::polar(1.0, third)) < 1e-15);

  const ExcitationVector identity = apply_uncertainty(nominal, mag, 1.0);
  CHECK(identity.values == nominal.values);
}

TEST_CASE("apply_uncertainty: rejects out-of-range values") {
  ExcitationVector nominal{Eigen::VectorXcd::Ones(4)};
  UncertaintyDescriptor mag{1, UncertaintyKind::magnitude, 0, 0.0, 1.0, 2};
  CHECK_THROWS_AS(apply_uncertainty(nominal, mag, 1.5), std::invalid_argument);
}

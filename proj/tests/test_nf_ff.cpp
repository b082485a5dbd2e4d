#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "mebd/nf_ff.hpp"

using namespace mebd;

namespace {

std::mt19937 rng(99);

FieldMap random_field(double side, double step) {
  std::normal_distribution<double> n(0.0, 1.0);
  FieldMap f;
  f.grid = build_grid(side, 5.0, step);
  f.values.resize(f.grid.point_count());
  for (int t = 0; t < f.values.size(); ++t) f.values[t] = Complex(n(rng), n(rng));
  return f;
}

FieldMap uniform_field(double side) {
  FieldMap f;
  f.grid = build_grid(side, 5.0, 0.5);
  f.values = Eigen::VectorXcd::Ones(f.grid.point_count());
  return f;
}

// Open-interval Simpson quadrature of the continuous aperture integral
// F(u) = int_{-L/2}^{L/2} exp(j 2 pi u x) dx.
Complex aperture_line_integral(double u, double aperture) {
  const int steps = 2000;
  const double h = aperture / steps;
  Complex acc(0.0, 0.0);
  for (int i = 0; i <= steps; ++i) {
    const double x = -0.5 * aperture + i * h;
    const double wgt = (i == 0 || i == steps) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    acc += wgt * std::polar(1.0, 2.0 * std::numbers::pi * u * x);
  }
  return acc * (h / 3.0);
}

}  // namespace

TEST_CASE("plane_wave_spectrum: Parseval holds for every pad factor") {
  const FieldMap f = random_field(5.0, 0.5);
  const double field_energy = f.values.squaredNorm();
  for (int pad : {1, 2, 3}) {
    const AngularSpectrum spec = plane_wave_spectrum(f, pad);
    const double bins = static_cast<double>(spec.amplitude.size());
    const double spectrum_energy = spec.amplitude.cwiseAbs2().sum() / bins;
    CHECK(spectrum_energy == doctest::Approx(field_energy).epsilon(1e-10));
  }
}

TEST_CASE("plane_wave_spectrum: one-cell translation applies a linear phase ramp") {
  FieldMap f = random_field(5.0, 0.5);
  const int n = f.grid.points_per_axis;
  // keep a zero border so the linear shift equals a circular shift
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix)
      if (ix < 2 || ix >= n - 2 || iy < 2 || iy >= n - 2) f.values[f.grid.index(ix, iy)] = 0.0;

  FieldMap shifted = f;
  shifted.values.setZero();
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 1; ix < n; ++ix)
      shifted.values[shifted.grid.index(ix, iy)] = f.values[f.grid.index(ix - 1, iy)];

  const int pad = 2;
  const AngularSpectrum a = plane_wave_spectrum(f, pad);
  const AngularSpectrum b = plane_wave_spectrum(shifted, pad);
  const int nf = n * pad;
  double max_err = 0.0;
  for (int q = 0; q < nf; ++q)
    for (int p = 0; p < nf; ++p) {
      const int centered = p - nf / 2;
      const Complex ramp = std::polar(1.0, 2.0 * std::numbers::pi * centered / nf);
      max_err = std::max(max_err, std::abs(b.amplitude(q, p) - ramp * a.amplitude(q, p)));
    }
  CHECK(max_err < 1e-10 * a.amplitude.cwiseAbs().maxCoeff());
}

TEST_CASE("nf_to_ff: pad factor only densifies the pattern lattice") {
  const FieldMap f = uniform_field(10.0);
  const PowerPattern p1 = nf_to_ff(f, 1);
  const PowerPattern p2 = nf_to_ff(f, 2);
  const int n1 = static_cast<int>(p1.u_axis.size());
  for (int q = 0; q < n1; ++q) {
    for (int p = 0; p < n1; ++p) {
      if (!p1.visible(q, p)) continue;
      // node (q, p) of the unpadded lattice appears at doubled indices
      const int q2 = 2 * (q - n1 / 2) + n1;
      const int p2i = 2 * (p - n1 / 2) + n1;
      REQUIRE(p2.u_axis[p2i] == doctest::Approx(p1.u_axis[p]).epsilon(1e-14));
      CHECK(std::abs(p2.values_db(q2, p2i) - p1.values_db(q, p)) < 1e-9);
    }
  }
}

TEST_CASE("nf_to_ff: uniform aperture matches the direct radiation integral") {
  const FieldMap f = uniform_field(10.0);
  const PowerPattern pat = nf_to_ff(f, 4);
  // samples are cell centers of an aperture one step wider than the grid span
  const double aperture = f.grid.points_per_axis * f.grid.step;
  const double first_null = 1.0 / aperture;
  const double peak = std::norm(aperture_line_integral(0.0, aperture));

  CHECK(pat.values_db(pat.u_axis.size() / 2, pat.u_axis.size() / 2) == 0.0);

  int compared = 0;
  for (int q = 0; q < pat.u_axis.size(); ++q) {
    for (int p = 0; p < pat.u_axis.size(); ++p) {
      const double u = pat.u_axis[p];
      const double v = pat.v_axis[q];
      if (std::abs(u) > 0.9 * first_null || std::abs(v) > 0.9 * first_null) continue;
      const double oracle = std::norm(aperture_line_integral(u, aperture)) *
                            std::norm(aperture_line_integral(v, aperture)) / (peak * peak);
      const double oracle_db = 10.0 * std::log10(oracle);
      CHECK(std::abs(pat.values_db(q, p) - oracle_db) < 0.5);
      ++compared;
    }
  }
  CHECK(compared > 10);
}

TEST_CASE("nf_to_ff: separable field transforms to an outer product") {
  const int n = 9;
  FieldMap f;
  f.grid = build_grid(4.0, 5.0, 0.5);
  REQUIRE(f.grid.points_per_axis == n);
  std::normal_distribution<double> dist(0.0, 1.0);
  Eigen::VectorXcd fx(n), fy(n);
  for (int i = 0; i < n; ++i) {
    fx[i] = Complex(dist(rng), dist(rng));
    fy[i] = Complex(dist(rng), dist(rng));
  }
  f.values.resize(n * n);
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) f.values[f.grid.index(ix, iy)] = fx[ix] * fy[iy];

  const int pad = 2;
  const AngularSpectrum spec = plane_wave_spectrum(f, pad);
  const int nf = n * pad;
  // naive 1-D transforms as the independent reference
  auto dft1 = [&](const Eigen::VectorXcd& x, int k_centered) {
    Complex acc(0.0, 0.0);
    for (int i = 0; i < n; ++i)
      acc += x[i] * std::polar(1.0, 2.0 * std::numbers::pi * k_centered * i / double(nf));
    return acc;
  };
  double max_rel = 0.0;
  const double scale = spec.amplitude.cwiseAbs().maxCoeff();
  for (int q = 0; q < nf; ++q)
    for (int p = 0; p < nf; ++p) {
      const Complex want = dft1(fx, p - nf / 2) * dft1(fy, q - nf / 2);
      max_rel = std::max(max_rel, std::abs(spec.amplitude(q, p) - want) / scale);
    }
  CHECK(max_rel < 1e-10);
}

TEST_CASE("nf_to_ff: zero field and too-coarse sampling are rejected") {
  FieldMap zero;
  zero.grid = build_grid(2.0, 5.0, 0.5);
  zero.values = Eigen::VectorXcd::Zero(zero.grid.point_count());
  CHECK_THROWS_AS(nf_to_ff(zero, 2), degenerate_input);

  FieldMap coarse;
  coarse.grid = build_grid(4.0, 5.0, 1.0);
  coarse.values = Eigen::VectorXcd::Ones(coarse.grid.point_count());
  CHECK_THROWS_AS(nf_to_ff(coarse, 2), std::invalid_argument);
  CHECK_THROWS_AS(plane_wave_spectrum(coarse, 2), std::invalid_argument);
}

TEST_CASE("nf_to_ff: visible peak is exactly 0 dB") {
  const PowerPattern pat = nf_to_ff(uniform_field(6.0), 2);
  double max_db = -1e9;
  for (int q = 0; q < pat.u_axis.size(); ++q)
    for (int p = 0; p < pat.u_axis.size(); ++p)
      if (pat.visible(q, p)) max_db = std::max(max_db, pat.values_db(q, p));
  CHECK(max_db == 0.0);
}

TEST_CASE("pattern_cut: symmetric pattern gives a symmetric principal cut") {
  const PowerPattern pat = nf_to_ff(uniform_field(8.0), 2);
  const PatternCut cut = pattern_cut(pat, 0.0);
  CHECK(cut.u0 == 0.0);
  CHECK(cut.db.maxCoeff() <= 0.0);
  const int n = static_cast<int>(cut.v.size());
  int mirrored = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (std::abs(cut.v[j] + cut.v[i]) < 1e-12) {
        CHECK(cut.db[i] == doctest::Approx(cut.db[j]).epsilon(1e-9));
        ++mirrored;
      }
    }
  }
  CHECK(mirrored > n / 2);
}

TEST_CASE("pattern_cut: u0 outside the span is rejected") {
  const PowerPattern pat = nf_to_ff(uniform_field(4.0), 1);
  CHECK_THROWS_AS(pattern_cut(pat, 5.0), std::invalid_argument);
}

TEST_CASE("zero_fill_outside: keeps the inner square and zeroes the rest") {
  FieldMap f = uniform_field(6.0);
  const FieldMap cut = zero_fill_outside(f, 2.0);
  for (int t = 0; t < f.grid.point_count(); ++t) {
    const Eigen::Vector3d r = f.grid.point(t);
    const bool inside = std::abs(r.x()) <= 1.0 + 1e-9 && std::abs(r.y()) <= 1.0 + 1e-9;
    CHECK(cut.values[t] == (inside ? Complex(1.0, 0.0) : Complex(0.0, 0.0)));
  }
  // full-side fill is the identity
  const FieldMap same = zero_fill_outside(f, 6.0);
  CHECK(same.values == f.values);
}

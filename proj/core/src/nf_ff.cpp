#include "mebd/nf_ff.hpp"

#include <cmath>
#include <mutex>
#include <vector>

#include <fftw3.h>

namespace mebd {

namespace {

constexpr double kDbFloor = -120.0;

// FFTW plan creation is not thread-safe; execution is.
std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

AngularSpectrum plane_wave_spectrum(const FieldMap& field, int pad_factor) {
  if (pad_factor < 1) throw std::invalid_argument("plane_wave_spectrum: pad_factor must be >= 1");
  if (field.grid.step > 0.5 + 1e-12)
    throw std::invalid_argument(
        "plane_wave_spectrum: grid step exceeds lambda/2, spectrum would alias");
  if (field.values.size() != field.grid.point_count())
    throw std::invalid_argument("plane_wave_spectrum: field size does not match its grid");

  const int n = field.grid.points_per_axis;
  const int nf = n * pad_factor;

  std::vector<std::complex<double>> in(static_cast<std::size_t>(nf) * nf, {0.0, 0.0});
  std::vector<std::complex<double>> out(static_cast<std::size_t>(nf) * nf);
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix)
      in[static_cast<std::size_t>(iy) * nf + ix] = field.values[field.grid.index(ix, iy)];

  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    fftw_plan plan = fftw_plan_dft_2d(nf, nf,
                                      reinterpret_cast<fftw_complex*>(in.data()),
                                      reinterpret_cast<fftw_complex*>(out.data()),
                                      FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
  }

  AngularSpectrum spec;
  spec.u_axis.resize(nf);
  spec.v_axis.resize(nf);
  const int half = nf / 2;
  for (int p = 0; p < nf; ++p) {
    const int centered = p - half;
    spec.u_axis[p] = centered / (nf * field.grid.step);
  }
  spec.v_axis = spec.u_axis;
  spec.amplitude.resize(nf, nf);
  for (int q = 0; q < nf; ++q) {
    const int ky = ((q - half) % nf + nf) % nf;
    for (int p = 0; p < nf; ++p) {
      const int kx = ((p - half) % nf + nf) % nf;
      spec.amplitude(q, p) = out[static_cast<std::size_t>(ky) * nf + kx];
    }
  }
  return spec;
}

PowerPattern nf_to_ff(const FieldMap& field, int pad_factor, bool obliquity) {
  if (field.values.norm() == 0.0)
    throw degenerate_input("nf_to_ff: zero field has no defined pattern");
  const AngularSpectrum spec = plane_wave_spectrum(field, pad_factor);
  const int nf = static_cast<int>(spec.u_axis.size());

  PowerPattern pat;
  pat.u_axis = spec.u_axis;
  pat.v_axis = spec.v_axis;
  pat.visible.resize(nf, nf);
  Eigen::MatrixXd power(nf, nf);
  double peak = 0.0;
  for (int q = 0; q < nf; ++q) {
    for (int p = 0; p < nf; ++p) {
      const double uu = spec.u_axis[p];
      const double vv = spec.v_axis[q];
      const double r2 = uu * uu + vv * vv;
      pat.visible(q, p) = r2 <= 1.0 + 1e-12;
      double val = std::norm(spec.amplitude(q, p));
      if (obliquity) val *= std::max(0.0, 1.0 - r2);
      power(q, p) = val;
      if (pat.visible(q, p) && val > peak) peak = val;
    }
  }
  if (peak <= 0.0) throw degenerate_input("nf_to_ff: no power in the visible region");

  pat.values_db.resize(nf, nf);
  for (int q = 0; q < nf; ++q)
    for (int p = 0; p < nf; ++p)
      pat.values_db(q, p) = pat.visible(q, p)
          ? std::max(10.0 * std::log10(power(q, p) / peak), kDbFloor)
          : std::numeric_limits<double>::quiet_NaN();
  return pat;
}

PatternCut pattern_cut(const PowerPattern& pattern, double u0) {
  const int nf = static_cast<int>(pattern.u_axis.size());
  if (nf == 0) throw std::invalid_argument("pattern_cut: empty pattern");
  if (u0 < pattern.u_axis[0] - 1e-12 || u0 > pattern.u_axis[nf - 1] + 1e-12)
    throw std::invalid_argument("pattern_cut: u0 lies outside the pattern span");

  int best = 0;
  for (int p = 1; p < nf; ++p)
    if (std::abs(pattern.u_axis[p] - u0) < std::abs(pattern.u_axis[best] - u0)) best = p;

  std::vector<double> vs, dbs;
  for (int q = 0; q < nf; ++q) {
    if (!pattern.visible(q, best)) continue;
    vs.push_back(pattern.v_axis[q]);
    dbs.push_back(pattern.values_db(q, best));
  }
  PatternCut cut;
  cut.u0 = pattern.u_axis[best];
  cut.v = Eigen::Map<Eigen::VectorXd>(vs.data(), static_cast<int>(vs.size()));
  cut.db = Eigen::Map<Eigen::VectorXd>(dbs.data(), static_cast<int>(dbs.size()));
  return cut;
}

FieldMap zero_fill_outside(const FieldMap& field, double side) {
  if (!(side > 0.0)) throw std::invalid_argument("zero_fill_outside: side must be positive");
  FieldMap out = field;
  const double half = 0.5 * side + 1e-9;
  for (int t = 0; t < field.grid.point_count(); ++t) {
    const Eigen::Vector3d r = field.grid.point(t);
    if (std::abs(r.x()) > half || std::abs(r.y()) > half) out.values[t] = 0.0;
  }
  return out;
}

}  // namespace mebd

#include "ghostsim/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace ghostsim {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Direct transform inner loops walk uniformly spaced evaluation points with a
// rotating phasor, re-anchored on an exact sin/cos every so often to keep
// rounding from drifting.
constexpr int kPhasorRefresh = 256;

double peak_normalize(std::vector<double>& v) {
  double peak = *std::max_element(v.begin(), v.end());
  if (peak <= 0) throw std::invalid_argument("pattern is identically zero; nothing to normalize");
  for (double& x : v) x /= peak;
  return peak;
}

// |sum_j m_j exp(-i 2 pi u axis_j)| for one u.
double dtft_magnitude(const std::vector<double>& axis, const std::vector<double>& m, double u) {
  cplx acc = 0.0;
  std::size_t n = m.size();
  double step_angle = -kTwoPi * u * (axis[1] - axis[0]);
  cplx step = std::polar(1.0, step_angle);
  cplx ph = 1.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (j % kPhasorRefresh == 0) ph = std::polar(1.0, -kTwoPi * u * (axis[j] - axis[0]));
    acc += m[j] * ph;
    ph *= step;
  }
  return std::abs(acc);
}

void require_uniform(const std::vector<double>& axis) {
  double d0 = axis[1] - axis[0];
  for (std::size_t i = 2; i < axis.size(); ++i) {
    double d = axis[i] - axis[i - 1];
    if (std::abs(d - d0) > 1e-9 * std::abs(d0))
      throw std::invalid_argument("axis is not uniformly spaced");
  }
}

struct PeakList {
  std::vector<double> positions;  // sub-sample, by quadratic refinement
  std::vector<double> heights;
};

// Local maxima above a floor, strongest first.
PeakList find_peaks(const std::vector<double>& axis, const std::vector<double>& v, double floor) {
  PeakList out;
  std::vector<std::size_t> idx;
  for (std::size_t i = 1; i + 1 < v.size(); ++i)
    if (v[i] >= floor && v[i] > v[i - 1] && v[i] >= v[i + 1]) idx.push_back(i);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });
  for (std::size_t i : idx) {
    double denom = v[i - 1] - 2 * v[i] + v[i + 1];
    double frac = (denom < 0) ? 0.5 * (v[i - 1] - v[i + 1]) / denom : 0.0;
    frac = std::clamp(frac, -0.5, 0.5);
    out.positions.push_back(axis[i] + frac * (axis[1] - axis[0]));
    out.heights.push_back(v[i]);
  }
  return out;
}

}  // namespace

Pattern fraunhofer_modulus(const Transmission& obj, const std::vector<double>& frequency_axis) {
  if (frequency_axis.size() < 2)
    throw std::invalid_argument("fraunhofer_modulus: need at least two output points");
  for (std::size_t i = 1; i < frequency_axis.size(); ++i)
    if (frequency_axis[i] <= frequency_axis[i - 1])
      throw std::invalid_argument("fraunhofer_modulus: frequency axis must be strictly increasing");
  const Grid& g = obj.grid;
  std::size_t n_out = frequency_axis.size();

  // Gather nonzero samples once; opaque screens are mostly zeros.
  struct Sample { double x, y; cplx t; };
  std::vector<Sample> live;
  if (g.dims == 1) {
    for (int i = 0; i < g.n; ++i)
      if (obj.t[static_cast<std::size_t>(i)] != cplx(0.0))
        live.push_back({g.coordinate(i), 0.0, obj.t[static_cast<std::size_t>(i)]});
  } else {
    for (int iy = 0; iy < g.n; ++iy)
      for (int ix = 0; ix < g.n; ++ix) {
        cplx t = obj.at(iy, ix);
        if (t != cplx(0.0)) live.push_back({g.coordinate(ix), g.coordinate(iy), t});
      }
  }
  if (live.empty()) throw std::invalid_argument("fraunhofer_modulus: object is fully opaque");

  double terms = static_cast<double>(live.size()) * static_cast<double>(n_out);
  if (g.dims == 2) terms *= static_cast<double>(n_out);
  if (terms > 8.6e9)
    throw std::invalid_argument(
        "fraunhofer_modulus: direct summation would need more than 2^33 terms; "
        "use a coarser output axis or fewer object samples");

  Pattern p;
  p.dims = g.dims;
  p.kind = AxisKind::frequency;
  p.axis = frequency_axis;
  double du = frequency_axis[1] - frequency_axis[0];
  bool uniform = true;
  for (std::size_t i = 2; i < n_out; ++i)
    if (std::abs(frequency_axis[i] - frequency_axis[i - 1] - du) > 1e-9 * du) uniform = false;

  auto phase_row = [&](double coord, std::vector<cplx>& row) {
    // Phasor recurrence along a uniform axis; exact evaluation otherwise.
    if (uniform) {
      cplx step = std::polar(1.0, -kTwoPi * du * coord);
      cplx ph = 1.0;
      for (std::size_t j = 0; j < n_out; ++j) {
        if (j % kPhasorRefresh == 0)
          ph = std::polar(1.0, -kTwoPi * (frequency_axis[j] - frequency_axis[0]) * coord);
        row[j] = ph;
        ph *= step;
      }
      cplx base = std::polar(1.0, -kTwoPi * frequency_axis[0] * coord);
      for (std::size_t j = 0; j < n_out; ++j) row[j] *= base;
    } else {
      for (std::size_t j = 0; j < n_out; ++j)
        row[j] = std::polar(1.0, -kTwoPi * frequency_axis[j] * coord);
    }
  };

  double cell = (g.dims == 1) ? g.pitch : g.pitch * g.pitch;
  if (g.dims == 1) {
    std::vector<cplx> acc(n_out, cplx(0.0));
    std::vector<cplx> row(n_out);
    for (const Sample& s : live) {
      phase_row(s.x, row);
      for (std::size_t j = 0; j < n_out; ++j) acc[j] += s.t * row[j];
    }
    p.values.resize(n_out);
    for (std::size_t j = 0; j < n_out; ++j) p.values[j] = std::norm(acc[j] * cell);
  } else {
    std::vector<cplx> acc(n_out * n_out, cplx(0.0));
    std::vector<cplx> rx(n_out), ry(n_out);
    for (const Sample& s : live) {
      phase_row(s.x, rx);
      phase_row(s.y, ry);
      for (std::size_t jy = 0; jy < n_out; ++jy) {
        cplx f = s.t * ry[jy];
        cplx* dst = acc.data() + jy * n_out;
        for (std::size_t jx = 0; jx < n_out; ++jx) dst[jx] += f * rx[jx];
      }
    }
    p.values.resize(n_out * n_out);
    for (std::size_t j = 0; j < p.values.size(); ++j) p.values[j] = std::norm(acc[j] * cell);
  }
  peak_normalize(p.values);
  return p;
}

Pattern analytic_double_slit(double width, double separation,
                             const std::vector<double>& frequency_axis) {
  if (width <= 0 || separation <= width)
    throw std::invalid_argument("analytic_double_slit: need 0 < width < separation");
  Pattern p;
  p.dims = 1;
  p.kind = AxisKind::frequency;
  p.axis = frequency_axis;
  p.values.resize(frequency_axis.size());
  for (std::size_t j = 0; j < frequency_axis.size(); ++j) {
    double a = std::numbers::pi * frequency_axis[j] * width;
    double s = (a == 0.0) ? 1.0 : std::sin(a) / a;
    double c = std::cos(std::numbers::pi * frequency_axis[j] * separation);
    p.values[j] = s * s * c * c;
  }
  return p;
}

double dominant_period(const std::vector<double>& axis, const std::vector<double>& values) {
  if (axis.size() != values.size() || axis.size() < 8)
    throw std::invalid_argument("dominant_period: need at least 8 samples");
  require_uniform(axis);
  double delta = axis[1] - axis[0];
  std::size_t n = values.size();
  double mean = 0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  std::vector<double> m(n);
  double mabs = 0;
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = values[i] - mean;
    mabs = std::max(mabs, std::abs(m[i]));
  }
  if (mabs == 0) return 0.0;

  // Coarse scan of the magnitude spectrum at 8x the natural resolution, then
  // a fine scan with quadratic refinement around the best coarse point.
  double window = delta * static_cast<double>(n);
  double u_max = 0.5 / delta;
  double coarse = 1.0 / (8.0 * window);
  double best_u = 0, best_mag = 0;
  for (double u = coarse; u <= u_max; u += coarse) {
    double mag = dtft_magnitude(axis, m, u);
    if (mag > best_mag) {
      best_mag = mag;
      best_u = u;
    }
  }
  if (best_mag < 1e-12 * mabs * static_cast<double>(n)) return 0.0;
  double fine = coarse / 64.0;
  double u0 = std::max(fine, best_u - coarse);
  double u1 = std::min(u_max, best_u + coarse);
  for (double u = u0; u <= u1; u += fine) {
    double mag = dtft_magnitude(axis, m, u);
    if (mag > best_mag) {
      best_mag = mag;
      best_u = u;
    }
  }
  double mm = dtft_magnitude(axis, m, best_u - fine);
  double mp = dtft_magnitude(axis, m, best_u + fine);
  double denom = mm - 2 * best_mag + mp;
  if (denom < 0) best_u += 0.5 * (mm - mp) / denom * fine;
  return 1.0 / best_u;
}

double central_fringe_period(const std::vector<double>& axis, const std::vector<double>& values) {
  if (axis.size() != values.size() || axis.size() < 16)
    throw std::invalid_argument("central_fringe_period: need at least 16 samples");
  require_uniform(axis);
  std::size_t n = values.size();

  // Light boxcar for wall/rise detection only; minima positions come from a
  // least-squares parabola over the raw valley floor, which is what keeps
  // the reading stable under estimator noise.
  std::vector<double> sm(n);
  const int hw = 2;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0;
    int c = 0;
    for (int k = -hw; k <= hw; ++k) {
      std::ptrdiff_t j = static_cast<std::ptrdiff_t>(i) + k;
      if (j >= 0 && j < static_cast<std::ptrdiff_t>(n)) {
        s += values[static_cast<std::size_t>(j)];
        ++c;
      }
    }
    sm[i] = s / c;
  }

  std::ptrdiff_t i0 =
      std::max_element(values.begin(), values.end()) - values.begin();
  double peak = values[static_cast<std::size_t>(i0)];
  if (peak <= 0)
    throw std::invalid_argument("central_fringe_period: peak is not positive");

  auto vertex_or = [](const std::vector<double>& xs, const std::vector<double>& ys,
                      double fallback) {
    double x0 = 0, scale = 0;
    for (double x : xs) x0 += x;
    x0 /= static_cast<double>(xs.size());
    for (double x : xs) scale = std::max(scale, std::abs(x - x0));
    if (scale == 0) return fallback;
    double s0 = 0, s1 = 0, s2 = 0, s3 = 0, s4 = 0, t0 = 0, t1 = 0, t2 = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      double t = (xs[i] - x0) / scale;
      double t_2 = t * t;
      s0 += 1;
      s1 += t;
      s2 += t_2;
      s3 += t_2 * t;
      s4 += t_2 * t_2;
      t0 += ys[i];
      t1 += ys[i] * t;
      t2 += ys[i] * t_2;
    }
    // normal equations for y = a t^2 + b t + c, by Cramer's rule
    double det = s4 * (s2 * s0 - s1 * s1) - s3 * (s3 * s0 - s1 * s2) +
                 s2 * (s3 * s1 - s2 * s2);
    if (std::abs(det) < 1e-12) return fallback;
    double a = (t2 * (s2 * s0 - s1 * s1) - s3 * (t1 * s0 - t0 * s1) +
                s2 * (t1 * s1 - t0 * s2)) / det;
    double b = (s4 * (t1 * s0 - t0 * s1) - t2 * (s3 * s0 - s1 * s2) +
                s2 * (s3 * t0 - s2 * t1)) / det;
    if (a <= 0) return fallback;
    double v = x0 - scale * b / (2 * a);
    double lo = *std::min_element(xs.begin(), xs.end());
    double hi = *std::max_element(xs.begin(), xs.end());
    return (v < lo || v > hi) ? fallback : v;
  };

  auto flanking_minimum = [&](int dir) {
    // walk down the wall until the smoothed curve is well below the peak
    std::ptrdiff_t i = i0;
    while (true) {
      i += dir;
      if (i < 1 || i + 1 >= static_cast<std::ptrdiff_t>(n))
        throw std::invalid_argument(
            "central_fringe_period: no flanking minimum inside the window");
      if (sm[static_cast<std::size_t>(i)] < 0.3 * peak) break;
    }
    // valley run: until the smoothed curve climbs 2% of peak off its
    // running minimum. The band must clear noise ripple yet stay below the
    // weakest structure that can flank the valley -- a single-aperture
    // sidelobe peaks at 4.7% of the maximum.
    double run_min = sm[static_cast<std::size_t>(i)];
    std::ptrdiff_t end = i;
    while (true) {
      std::ptrdiff_t j = end + dir;
      if (j < 1 || j + 1 >= static_cast<std::ptrdiff_t>(n)) break;
      double v = sm[static_cast<std::size_t>(j)];
      run_min = std::min(run_min, v);
      if (v > run_min + 0.02 * peak) break;
      end = j;
    }
    std::ptrdiff_t lo = std::min(i, end), hi = std::max(i, end);
    std::ptrdiff_t imin = lo;
    for (std::ptrdiff_t j = lo; j <= hi; ++j)
      if (values[static_cast<std::size_t>(j)] < values[static_cast<std::size_t>(imin)])
        imin = j;
    double fallback = axis[static_cast<std::size_t>(imin)];

    // The amplitude changes sign through a dark fringe, so near the minimum
    // sqrt(I) is a vee with straight (generally unequal) walls. A partially
    // coherent measurement fills the dark fringe with a positive floor, which
    // rounds the vee into a hyperbola; subtracting the valley's own floor
    // before the square root restores the straight walls (and is a no-op on
    // noiseless data). Fit the two wall slopes with the crossing position
    // scanned over a few samples; this stays unbiased where a parabola on I
    // drifts up the shallower wall.
    double vfloor = values[static_cast<std::size_t>(imin)];
    std::vector<double> xs, ys;
    std::size_t left_count = 0, right_count = 0;
    for (std::ptrdiff_t j = lo; j <= hi; ++j) {
      double v = values[static_cast<std::size_t>(j)];
      if (v <= 0.15 * peak) {
        xs.push_back(axis[static_cast<std::size_t>(j)]);
        ys.push_back(std::sqrt(std::max(0.0, v - vfloor)));
        if (j < imin) ++left_count;
        if (j > imin) ++right_count;
      }
    }
    if (left_count >= 2 && right_count >= 2 && xs.size() >= 5) {
      double h = axis[1] - axis[0];
      double best_x = fallback, best_ssr = std::numeric_limits<double>::infinity();
      for (int k = -240; k <= 240; ++k) {
        double x0 = fallback + k * (h / 40);
        double sl2 = 0, sly = 0, sr2 = 0, sry = 0;
        for (std::size_t j = 0; j < xs.size(); ++j) {
          double d = xs[j] - x0;
          if (d < 0) {
            sl2 += d * d;
            sly += ys[j] * (-d);
          } else {
            sr2 += d * d;
            sry += ys[j] * d;
          }
        }
        if (sl2 <= 0 || sr2 <= 0) continue;
        double ml = sly / sl2, mr = sry / sr2;
        double ssr = 0;
        for (std::size_t j = 0; j < xs.size(); ++j) {
          double d = xs[j] - x0;
          double model = d < 0 ? ml * (-d) : mr * d;
          double r = ys[j] - model;
          ssr += r * r;
        }
        if (ssr < best_ssr) {
          best_ssr = ssr;
          best_x = x0;
        }
      }
      return best_x;
    }

    // too few wall samples for the vee: parabola over the valley floor
    xs.clear();
    ys.clear();
    for (std::ptrdiff_t j = lo; j <= hi; ++j) {
      if (values[static_cast<std::size_t>(j)] <= 0.25 * peak) {
        xs.push_back(axis[static_cast<std::size_t>(j)]);
        ys.push_back(values[static_cast<std::size_t>(j)]);
      }
    }
    if (xs.size() < 5) {
      xs.clear();
      ys.clear();
      for (std::ptrdiff_t j = lo; j <= hi; ++j) {
        xs.push_back(axis[static_cast<std::size_t>(j)]);
        ys.push_back(values[static_cast<std::size_t>(j)]);
      }
    }
    if (xs.size() < 3) return fallback;
    return vertex_or(xs, ys, fallback);
  };

  double right = flanking_minimum(+1);
  double left = flanking_minimum(-1);
  return right - left;
}

CompareReport compare_patterns(const Pattern& pattern, const Pattern& reference) {
  pattern.validate();
  reference.validate();
  if (pattern.dims != 1 || reference.dims != 1)
    throw std::invalid_argument("compare_patterns: 1D patterns only");
  if (pattern.kind != reference.kind)
    throw std::invalid_argument("compare_patterns: axis kinds differ");
  double lo = std::max(pattern.axis.front(), reference.axis.front());
  double hi = std::min(pattern.axis.back(), reference.axis.back());
  if (lo >= hi) throw std::invalid_argument("compare_patterns: axes do not overlap");

  std::vector<double> ax, a, b;
  std::size_t ri = 0;
  for (std::size_t i = 0; i < pattern.axis.size(); ++i) {
    double x = pattern.axis[i];
    if (x < lo || x > hi) continue;
    while (ri + 2 < reference.axis.size() && reference.axis[ri + 1] <= x) ++ri;
    double x0 = reference.axis[ri], x1 = reference.axis[ri + 1];
    double w = (x - x0) / (x1 - x0);
    ax.push_back(x);
    a.push_back(pattern.values[i]);
    b.push_back((1 - w) * reference.values[ri] + w * reference.values[ri + 1]);
  }
  if (ax.size() < 8)
    throw std::invalid_argument("compare_patterns: overlap region has fewer than 8 samples");
  peak_normalize(a);
  peak_normalize(b);

  CompareReport rep;
  rep.compared_samples = ax.size();
  double ss = 0;
  for (std::size_t i = 0; i < a.size(); ++i) ss += (a[i] - b[i]) * (a[i] - b[i]);
  rep.rms_error = std::sqrt(ss / static_cast<double>(a.size()));
  auto period_or_zero = [](const std::vector<double>& x, const std::vector<double>& v) {
    try {
      return central_fringe_period(x, v);
    } catch (const std::invalid_argument&) {
      return 0.0;
    }
  };
  rep.fringe_period = period_or_zero(ax, a);
  rep.reference_period = period_or_zero(ax, b);

  PeakList pa = find_peaks(ax, a, 0.05);
  PeakList pb = find_peaks(ax, b, 0.05);
  std::size_t count = std::min<std::size_t>(pa.positions.size(), 7);
  for (std::size_t i = 0; i < count && !pb.positions.empty(); ++i) {
    double pos = pa.positions[i];
    double best = pb.positions[0];
    for (double q : pb.positions)
      if (std::abs(q - pos) < std::abs(best - pos)) best = q;
    rep.peak_offsets.push_back(pos - best);
  }
  return rep;
}

}  // namespace ghostsim

#include "ghostsim/optics_core.hpp"

#include <cmath>
#include <stdexcept>

namespace ghostsim {

Grid::Grid(int dims_, int n_, double pitch_) : dims(dims_), n(n_), pitch(pitch_) {
  if (dims != 1 && dims != 2) throw std::invalid_argument("Grid: dims must be 1 or 2");
  // even so that sample n/2 sits exactly at 0 and half-rotations are exact
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("Grid: need an even sample count of at least 2 per axis");
  if (!(pitch > 0.0)) throw std::invalid_argument("Grid: pitch must be positive");
}

std::vector<double> Grid::axis() const {
  std::vector<double> a(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) a[static_cast<std::size_t>(i)] = coordinate(i);
  return a;
}

std::size_t Grid::sample_count() const {
  std::size_t c = static_cast<std::size_t>(n);
  return dims == 2 ? c * c : c;
}

bool Grid::compatible(const Grid& other) const {
  return dims == other.dims && n == other.n && pitch == other.pitch;
}

ComplexField::ComplexField(const Grid& g) : grid(g), samples(g.sample_count(), cplx{0.0, 0.0}) {}

ComplexField::ComplexField(const Grid& g, std::vector<cplx> s) : grid(g), samples(std::move(s)) {
  if (samples.size() != grid.sample_count())
    throw std::invalid_argument("ComplexField: sample count does not match grid");
}

double energy(const ComplexField& f) {
  double acc = 0.0;
  for (const cplx& v : f.samples) acc += std::norm(v);
  double cell = f.grid.pitch;
  if (f.grid.dims == 2) cell *= f.grid.pitch;
  return acc * cell;
}

void SetupGeometry::validate() const {
  if (!(wavelength > 0.0)) throw std::invalid_argument("SetupGeometry: wavelength must be > 0");
  if (!(d0 > 0.0)) throw std::invalid_argument("SetupGeometry: d0 must be > 0");
  if (!(d1 > 0.0) || !(d2 > 0.0) || !(d_ref > 0.0))
    throw std::invalid_argument("SetupGeometry: distances must be > 0");
}

bool SetupGeometry::fourier_condition_met(double tol) const {
  return std::abs(d_ref - (d1 + d2)) <= tol;
}

void Pattern::validate() const {
  if (dims != 1 && dims != 2) throw std::invalid_argument("Pattern: dims must be 1 or 2");
  if (axis.size() < 2) throw std::invalid_argument("Pattern: need at least 2 axis samples");
  for (std::size_t i = 1; i < axis.size(); ++i)
    if (!(axis[i] > axis[i - 1]))
      throw std::invalid_argument("Pattern: axis must be strictly increasing");
  std::size_t expect = axis.size();
  if (dims == 2) expect *= axis.size();
  if (values.size() != expect)
    throw std::invalid_argument("Pattern: value count does not match axis");
}

std::vector<double> frequency_axis(const Grid& grid, double wavelength, double d2) {
  if (!(wavelength > 0.0) || !(d2 > 0.0))
    throw std::invalid_argument("frequency_axis: wavelength and d2 must be > 0");
  std::vector<double> nu(static_cast<std::size_t>(grid.n));
  for (int i = 0; i < grid.n; ++i)
    nu[static_cast<std::size_t>(i)] = grid.coordinate(i) / (wavelength * d2);
  return nu;
}

double fraunhofer_distance(double aperture_width, double wavelength) {
  if (!(aperture_width > 0.0) || !(wavelength > 0.0))
    throw std::invalid_argument("fraunhofer_distance: arguments must be > 0");
  return M_PI * aperture_width * aperture_width / wavelength;
}

std::string axis_kind_name(AxisKind k) {
  return k == AxisKind::displacement ? "displacement_m" : "frequency_per_m";
}

}  // namespace ghostsim

#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace ghostsim {

using cplx = std::complex<double>;

// Uniformly sampled transverse grid, centered so that coordinate(n/2) == 0.
// 2D grids are square: same n and pitch on both axes, row-major storage
// with index = iy * n + ix.
struct Grid {
  int dims = 1;
  int n = 0;
  double pitch = 0.0;  // meters

  Grid() = default;
  Grid(int dims_, int n_, double pitch_);

  double coordinate(int i) const { return (i - n / 2) * pitch; }
  std::vector<double> axis() const;
  double span() const { return n * pitch; }
  std::size_t sample_count() const;
  bool compatible(const Grid& other) const;
  bool operator==(const Grid& other) const = default;
};

// Scalar complex field sampled on a grid.
struct ComplexField {
  Grid grid;
  std::vector<cplx> samples;

  ComplexField() = default;
  explicit ComplexField(const Grid& g);
  ComplexField(const Grid& g, std::vector<cplx> s);

  cplx& at(int ix) { return samples[static_cast<std::size_t>(ix)]; }
  cplx& at(int iy, int ix) { return samples[static_cast<std::size_t>(iy) * grid.n + ix]; }
  const cplx& at(int ix) const { return samples[static_cast<std::size_t>(ix)]; }
  const cplx& at(int iy, int ix) const {
    return samples[static_cast<std::size_t>(iy) * grid.n + ix];
  }
};

// discrete energy:  sum |E|^2 * pitch^dims
double energy(const ComplexField& f);

// Bench distances for the two-arm setup. d_ref is the source-to-detector
// distance of the bucket-free arm; the test arm is d1 (source->object) plus
// d2 (object->detector).
struct SetupGeometry {
  double wavelength = 0.0;  // meters
  double d0 = 0.0;          // source spot diameter
  double d1 = 0.0;
  double d2 = 0.0;
  double d_ref = 0.0;

  void validate() const;  // throws std::invalid_argument on nonphysical input
  bool fourier_condition_met(double tol = 1e-9) const;
};

enum class AxisKind { displacement, frequency };

// Measured 1D/2D pattern with its sample axis. 2D patterns are square and
// share one axis vector per dimension; values are row-major.
struct Pattern {
  int dims = 1;
  AxisKind kind = AxisKind::displacement;
  std::vector<double> axis;
  std::vector<double> values;

  void validate() const;  // axis strictly increasing, sizes consistent
  double value_at(int ix) const { return values[static_cast<std::size_t>(ix)]; }
  double value_at(int iy, int ix) const {
    return values[static_cast<std::size_t>(iy) * axis.size() + ix];
  }
};

// Detector displacement x maps to object spatial frequency nu = x / (lambda d2).
std::vector<double> frequency_axis(const Grid& grid, double wavelength, double d2);

// Fraunhofer (far-field) characteristic distance pi a^2 / lambda for an
// aperture of full width a.
double fraunhofer_distance(double aperture_width, double wavelength);

std::string axis_kind_name(AxisKind k);

}  // namespace ghostsim

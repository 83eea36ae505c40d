#include "ghostsim/objects.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ghostsim/array_io.hpp"

namespace ghostsim {
namespace {

constexpr double kModulusSlack = 1e-12;

// Sample centers inside either opening of a centered slit pair.
bool in_slit_pair(double x, double width, double separation) {
  return std::abs(std::abs(x) - separation / 2) < width / 2;
}

void check_pair(double width, double separation, double span, const char* what) {
  if (width <= 0) throw std::invalid_argument(std::string(what) + ": width must be positive");
  // separation == width is allowed: the openings touch and act as one
  // aperture, which is a legitimate (if degenerate) mask
  if (separation < width)
    throw std::invalid_argument(std::string(what) + ": openings overlap (separation < width)");
  if (separation / 2 + width / 2 > span / 2)
    throw std::invalid_argument(std::string(what) + ": slit pair extends beyond the grid");
}

}  // namespace

void Transmission::validate() const {
  if (t.size() != static_cast<std::size_t>(grid.sample_count()))
    throw std::invalid_argument("transmission: sample count does not match grid");
  for (const cplx& z : t)
    if (std::abs(z) > 1.0 + kModulusSlack)
      throw std::invalid_argument("transmission: |t| exceeds 1 (a passive mask cannot amplify)");
  if (pad_fill != 0.0 && pad_fill != 1.0)
    throw std::invalid_argument("transmission: pad_fill must be 0 (opaque surround) or 1 (open)");
}

Transmission double_slit(double width, double separation, const Grid& grid) {
  if (grid.dims != 1) throw std::invalid_argument("double_slit: 1D grid required");
  check_pair(width, separation, grid.span(), "double_slit");
  Transmission out;
  out.grid = grid;
  out.t.assign(static_cast<std::size_t>(grid.n), cplx(0.0));
  for (int i = 0; i < grid.n; ++i)
    if (in_slit_pair(grid.coordinate(i), width, separation)) out.t[static_cast<std::size_t>(i)] = 1.0;
  out.label = "double_slit";
  return out;
}

Transmission phase_grooves(double width, double separation, double depth, double n_index,
                           double wavelength, double aperture, const Grid& grid) {
  if (grid.dims != 1) throw std::invalid_argument("phase_grooves: 1D grid required");
  check_pair(width, separation, grid.span(), "phase_grooves");
  if (depth < 0) throw std::invalid_argument("phase_grooves: depth must be non-negative");
  if (n_index <= 1) throw std::invalid_argument("phase_grooves: refractive index must exceed 1");
  if (wavelength <= 0) throw std::invalid_argument("phase_grooves: wavelength must be positive");
  if (aperture < separation + width)
    throw std::invalid_argument("phase_grooves: plate aperture must contain both grooves");
  if (aperture > grid.span())
    throw std::invalid_argument("phase_grooves: plate aperture extends beyond the grid");
  double phase = 2 * std::numbers::pi * (n_index - 1) * depth / wavelength;
  cplx groove = std::polar(1.0, phase);
  Transmission out;
  out.grid = grid;
  out.t.assign(static_cast<std::size_t>(grid.n), cplx(0.0));
  for (int i = 0; i < grid.n; ++i) {
    double x = grid.coordinate(i);
    if (std::abs(x) > aperture / 2) continue;
    out.t[static_cast<std::size_t>(i)] = in_slit_pair(x, width, separation) ? groove : cplx(1.0);
  }
  out.label = "phase_grooves";
  return out;
}

Transmission crossed_double_slit(double width, double separation_x, double separation_y,
                                 const Grid& grid, double aperture) {
  if (grid.dims != 2) throw std::invalid_argument("crossed_double_slit: 2D grid required");
  check_pair(width, separation_x, grid.span(), "crossed_double_slit (x)");
  check_pair(width, separation_y, grid.span(), "crossed_double_slit (y)");
  if (aperture > 0) {
    if (aperture < separation_x + width || aperture < separation_y + width)
      throw std::invalid_argument("crossed_double_slit: plate aperture must contain both slit pairs");
    if (aperture > grid.span())
      throw std::invalid_argument("crossed_double_slit: plate aperture extends beyond the grid");
  }
  Transmission out;
  out.grid = grid;
  out.t.assign(static_cast<std::size_t>(grid.sample_count()), cplx(0.0));
  for (int iy = 0; iy < grid.n; ++iy) {
    double y = grid.coordinate(iy);
    bool open_y = in_slit_pair(y, width, separation_y);
    bool in_plate_y = aperture <= 0 || std::abs(y) <= aperture / 2;
    for (int ix = 0; ix < grid.n; ++ix) {
      double x = grid.coordinate(ix);
      if (!in_plate_y || (aperture > 0 && std::abs(x) > aperture / 2)) continue;
      if (open_y || in_slit_pair(x, width, separation_x))
        out.t[static_cast<std::size_t>(iy) * grid.n + ix] = 1.0;
    }
  }
  out.label = "crossed_double_slit";
  return out;
}

Transmission identity_object(const Grid& grid) {
  Transmission out;
  out.grid = grid;
  out.t.assign(static_cast<std::size_t>(grid.sample_count()), cplx(1.0));
  out.pad_fill = 1.0;
  out.label = "identity";
  return out;
}

Transmission transmission_from_file(const std::string& path, const Grid& grid) {
  AnyArray a = read_array(path);
  std::size_t want = static_cast<std::size_t>(grid.sample_count());
  bool shape_ok = false;
  if (grid.dims == 1)
    shape_ok = (a.extents.size() == 1 && a.extents[0] == static_cast<std::uint32_t>(grid.n));
  else
    shape_ok = (a.extents.size() == 2 && a.extents[0] == static_cast<std::uint32_t>(grid.n) &&
                a.extents[1] == static_cast<std::uint32_t>(grid.n));
  if (!shape_ok || a.values.size() != want)
    throw FormatError(path + ": array shape does not match the simulation grid");
  Transmission out;
  out.grid = grid;
  out.t = std::move(a.values);
  out.label = "from_file:" + path;
  for (cplx& z : out.t) {
    double m = std::abs(z);
    if (m > 1.0 + kModulusSlack) {
      z /= m;  // keep the phase, pull the modulus back to a passive mask
      ++out.clamped_samples;
    }
  }
  return out;
}

}  // namespace ghostsim

#pragma once

#include <string>

#include "ghostsim/optics_core.hpp"

namespace ghostsim {

// Complex transmission sampled on the simulation grid. pad_fill is what the
// object looks like beyond the stored window when a propagation embeds it in
// a padded frame: 0 for anything mounted in an opaque holder, 1 for "no
// object in the beam".
struct Transmission {
  Grid grid;
  std::vector<cplx> t;
  double pad_fill = 0.0;
  std::string label;
  int clamped_samples = 0;  // from_file only: inputs pulled back to |t| <= 1

  void validate() const;  // |t| <= 1 + 1e-12 everywhere
  const cplx& at(int ix) const { return t[static_cast<std::size_t>(ix)]; }
  const cplx& at(int iy, int ix) const {
    return t[static_cast<std::size_t>(iy) * grid.n + ix];
  }
};

// Two clear slits of equal width, centers separation apart, in an opaque
// screen. A sample is open when its center lies inside an opening.
Transmission double_slit(double width, double separation, const Grid& grid);

// Transparent plate with two etched grooves (double-slit layout). Grooves
// advance the phase by 2 pi (n_index - 1) depth / wavelength; outside the
// plate aperture the screen is opaque.
Transmission phase_grooves(double width, double separation, double depth, double n_index,
                           double wavelength, double aperture, const Grid& grid);

// Union of a horizontal slit pair (separated along x) and a vertical pair
// (separated along y), sharing a center. 2D grids only. A positive aperture
// bounds the open stripes by a square plate of that side length (opaque
// outside); 0 lets them run the full grid.
Transmission crossed_double_slit(double width, double separation_x, double separation_y,
                                 const Grid& grid, double aperture = 0.0);

// t = 1 everywhere (empty bench).
Transmission identity_object(const Grid& grid);

// Loads a transmission from a binary array file (real or complex, matching
// the grid sample count). Samples with |t| > 1 + 1e-12 are clamped to unit
// modulus, keeping phase; the count is reported on the result.
Transmission transmission_from_file(const std::string& path, const Grid& grid);

}  // namespace ghostsim

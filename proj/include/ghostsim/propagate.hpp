#pragma once

#include <vector>

#include "ghostsim/optics_core.hpp"

namespace ghostsim {

// Diagnostics from a transfer-function propagation. Both are fractions of
// the input spectral energy: evanescent content is removed exactly (the
// kernel is zero there); content beyond the aliasing band limit for the
// padded frame is kept but reported so callers can warn and enlarge the pad.
struct PropagationStats {
  double evanescent_fraction = 0.0;
  double beyond_band_limit_fraction = 0.0;
  double band_limit = 0.0;  // cycles per meter, per axis
};

// Exact free-space transfer-function propagation over distance z (either
// sign). The field is embedded centered in a frame pad_factor times larger,
// multiplied in the spectral domain by exp(i 2 pi z sqrt(1/wl^2 - f^2)) with
// evanescent frequencies zeroed, and cropped back. Propagating z then -z
// reproduces the input to rounding; energy is conserved apart from the
// reported evanescent fraction and frame-leak at the crop.
ComplexField angular_spectrum(const ComplexField& in, double distance, double wavelength,
                              int pad_factor = 2, PropagationStats* stats = nullptr);

// Single-transform paraxial propagation to the conjugate grid with output
// pitch wl * z / (n * pitch). Positive distances only. Unitary in the
// discrete sense: total |E|^2 times cell area is preserved exactly up to
// rounding, with no embedding pad.
ComplexField fresnel_single_step(const ComplexField& in, double distance, double wavelength);

// Back-focal-plane field of an ideal thin lens in the 2f arrangement: an
// exact rescaled Fourier transform of the input,
//   E_out(x) = (wl f)^(-dims/2) * sum_u E(u) exp(-i 2 pi x u / (wl f)) * cell,
// evaluated on the input grid (x maps to spatial frequency x / (wl f)).
// Computed by a chirp convolution, so any grid size and scale work; the
// constant piston phase is dropped.
ComplexField lens_2f(const ComplexField& in, double focal_length, double wavelength);

// Brute-force paraxial quadrature
//   E_out(v) = (i wl z)^(-1/2) sum_u E(u) exp(i pi (v-u)^2 / (wl z)) * pitch
// for validating the transform-based paths. 1D only; input samples times
// output points capped at 1e7.
std::vector<cplx> direct_integral_oracle(const ComplexField& in, double distance,
                                         double wavelength, const std::vector<double>& out_axis);

// Largest spatial frequency the padded frame carries without wrap-around
// aliasing of the transfer kernel's fastest fringes.
double alias_free_band_limit(double wavelength, double distance, int frame_n, double pitch);

}  // namespace ghostsim

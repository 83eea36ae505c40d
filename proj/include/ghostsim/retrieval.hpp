#pragma once

#include <cstdint>
#include <vector>

#include "ghostsim/optics_core.hpp"

namespace ghostsim {

// Recover a real, non-negative 1D object from the modulus of its Fourier
// transform plus a support constraint -- the classic alternating-projection
// setting. The modulus is given on centered DFT bins of the object grid
// (bin i holds frequency (i - n/2) / (n pitch)).
struct RetrievalProblem {
  Grid grid;
  std::vector<double> modulus;
  std::vector<std::uint8_t> support;  // nonzero = object may live here
  int max_iterations = 500;
  double beta = 0.9;                  // feedback strength (hybrid input-output only)
  std::uint64_t master_seed = 0;
  std::uint64_t init_index = 0;       // selects the random start

  void validate() const;
};

struct RetrievalReport {
  // Best constrained estimate: real, non-negative, zero outside the support.
  std::vector<double> object;
  // Modulus-domain residual of the constrained estimate, one per iteration.
  std::vector<double> error_history;
  double best_error = 0.0;
  int best_iteration = 0;
};

// Error reduction: project onto the measured modulus, then clamp to the
// support and non-negativity. The residual is non-increasing.
RetrievalReport error_reduction(const RetrievalProblem& problem);

// Hybrid input-output: same modulus projection, but constraint violations
// are pushed back with feedback -beta instead of being zeroed, which lets
// the iterate escape the local stagnation error reduction falls into.
RetrievalReport hio(const RetrievalProblem& problem);

// Distance between an estimate and the truth modulo the ambiguities the
// modulus cannot see: circular shifts, mirror image, and positive scale.
// Returns sqrt(1 - rho^2) where rho is the best-case normalized correlation
// (also written to *correlation when given).
double reconstruction_error(const std::vector<double>& estimate,
                            const std::vector<double>& truth,
                            double* correlation = nullptr);

}  // namespace ghostsim

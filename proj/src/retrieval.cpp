#include "ghostsim/retrieval.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ghostsim/fft.hpp"
#include "ghostsim/rng.hpp"

namespace ghostsim {
namespace {

RetrievalReport iterate(const RetrievalProblem& p, bool hybrid) {
  p.validate();
  int n = p.grid.n;
  std::size_t un = static_cast<std::size_t>(n);

  // Measured modulus in unshifted DFT bin order.
  std::vector<double> m(un);
  double m_norm_sq = 0;
  for (int j = 0; j < n; ++j) {
    m[static_cast<std::size_t>(j)] = p.modulus[static_cast<std::size_t>((j + n / 2) % n)];
    m_norm_sq += m[static_cast<std::size_t>(j)] * m[static_cast<std::size_t>(j)];
  }
  if (m_norm_sq <= 0) throw std::invalid_argument("retrieval: modulus is identically zero");
  double m_norm = std::sqrt(m_norm_sq);

  std::vector<double> g(un, 0.0);
  CounterStream stream(p.master_seed, StreamContext::retrieval_init, p.init_index);
  for (int i = 0; i < n; ++i)
    if (p.support[static_cast<std::size_t>(i)])
      g[static_cast<std::size_t>(i)] = stream.uniform(static_cast<std::uint64_t>(i));

  FftwArray<cplx> buf(un);
  FftwArray<cplx> check(un);
  std::vector<double> estimate(un);
  RetrievalReport rep;
  rep.error_history.reserve(static_cast<std::size_t>(p.max_iterations));
  rep.best_error = std::numeric_limits<double>::infinity();

  for (int it = 0; it < p.max_iterations; ++it) {
    for (int i = 0; i < n; ++i) buf.data()[i] = g[static_cast<std::size_t>(i)];
    fft::c2c_forward(buf.data(), 1, n);
    for (int j = 0; j < n; ++j) {
      double mag = std::abs(buf.data()[j]);
      // Modulus projection; a dead bin keeps phase zero.
      buf.data()[j] = (mag > 0) ? buf.data()[j] * (m[static_cast<std::size_t>(j)] / mag)
                                : cplx(m[static_cast<std::size_t>(j)], 0.0);
    }
    fft::c2c_backward(buf.data(), 1, n);

    // The estimate this iteration delivers is the field pushed back onto the
    // object constraints: real, non-negative, inside the support. The
    // residual history scores that estimate, so the reported object is
    // always feasible even when the driving iterate is not (hybrid mode
    // deliberately lets it wander).
    for (int i = 0; i < n; ++i) {
      std::size_t ui = static_cast<std::size_t>(i);
      double gp = buf.data()[i].real();  // realness is part of the object constraint
      estimate[ui] = (p.support[ui] && gp >= 0) ? gp : 0.0;
    }
    for (int i = 0; i < n; ++i) check.data()[i] = estimate[static_cast<std::size_t>(i)];
    fft::c2c_forward(check.data(), 1, n);
    double err_sq = 0;
    for (int j = 0; j < n; ++j) {
      double d = std::abs(check.data()[j]) - m[static_cast<std::size_t>(j)];
      err_sq += d * d;
    }
    double err = std::sqrt(err_sq) / m_norm;
    rep.error_history.push_back(err);
    if (err < rep.best_error) {
      rep.best_error = err;
      rep.best_iteration = it;
      rep.object = estimate;
    }

    for (int i = 0; i < n; ++i) {
      std::size_t ui = static_cast<std::size_t>(i);
      double gp = buf.data()[i].real();
      bool valid = p.support[ui] && gp >= 0;
      if (valid)
        g[ui] = gp;
      else
        g[ui] = hybrid ? g[ui] - p.beta * gp : 0.0;
    }
  }
  return rep;
}

}  // namespace

void RetrievalProblem::validate() const {
  if (grid.dims != 1) throw std::invalid_argument("retrieval: 1D grids only");
  std::size_t un = static_cast<std::size_t>(grid.n);
  if (modulus.size() != un)
    throw std::invalid_argument("retrieval: modulus size does not match the grid");
  if (support.size() != un)
    throw std::invalid_argument("retrieval: support size does not match the grid");
  bool any = false;
  for (std::uint8_t s : support) any = any || (s != 0);
  if (!any) throw std::invalid_argument("retrieval: support is empty");
  for (double v : modulus)
    if (!(v >= 0)) throw std::invalid_argument("retrieval: modulus must be non-negative");
  if (max_iterations < 1) throw std::invalid_argument("retrieval: need at least one iteration");
  if (beta <= 0 || beta >= 2) throw std::invalid_argument("retrieval: beta outside (0, 2)");
}

RetrievalReport error_reduction(const RetrievalProblem& problem) {
  return iterate(problem, false);
}

RetrievalReport hio(const RetrievalProblem& problem) { return iterate(problem, true); }

double reconstruction_error(const std::vector<double>& estimate,
                            const std::vector<double>& truth, double* correlation) {
  if (estimate.size() != truth.size() || estimate.empty())
    throw std::invalid_argument("reconstruction_error: size mismatch");
  std::size_t n = estimate.size();
  double ee = 0, tt = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ee += estimate[i] * estimate[i];
    tt += truth[i] * truth[i];
  }
  if (ee <= 0 || tt <= 0)
    throw std::invalid_argument("reconstruction_error: an input is identically zero");

  // Best normalized correlation over every circular shift of the estimate
  // and of its mirror image.
  double best = -1;
  for (int flip = 0; flip < 2; ++flip) {
    for (std::size_t s = 0; s < n; ++s) {
      double acc = 0;
      for (std::size_t i = 0; i < n; ++i) {
        std::size_t j = (i + s) % n;
        std::size_t k = flip ? (n - j) % n : j;
        acc += estimate[k] * truth[i];
      }
      best = std::max(best, acc / std::sqrt(ee * tt));
    }
  }
  if (correlation) *correlation = best;
  return std::sqrt(std::max(0.0, 1.0 - best * best));
}

}  // namespace ghostsim

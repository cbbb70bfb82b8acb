#pragma once

#include "bhscat/util.hpp"

namespace bhscat {

/// Spectral parameters of the model: real wavenumber k > 0, damping sigma >= 0,
/// and the complex wavenumber kappa, the root of kappa^4 = k^2 + i*sigma*k with
/// kappa_r > 0 and kappa_i >= 0.
struct Wavenumber {
  double k = 0.0;
  double sigma = 0.0;
  double kappa_r = 0.0;
  double kappa_i = 0.0;
  cplx kappa;
};

/// Builds the Wavenumber from the closed-form nested radicals. The branch is
/// pinned by construction (kappa_r > 0, kappa_i >= 0); kappa_i is evaluated
/// through the conjugate rewriting
///   kappa_i^2 = sigma^2 k^2 / (8 kappa_r^2 (sqrt(k^4 + sigma^2 k^2) + k^2))
/// which avoids the cancellation in the direct difference of radicals.
/// Throws std::domain_error for k <= 0 or sigma < 0.
Wavenumber complex_wavenumber(double k, double sigma);

/// Inverse map: the k > 0 with Re(kappa(k, sigma)) == kappa_r. Monotone
/// bisection; used to lay out frequency sweeps on a uniform kappa_r grid.
double k_from_kappa_r(double kappa_r, double sigma);

}  // namespace bhscat

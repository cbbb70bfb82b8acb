#include "bhscat/wavenumber.hpp"

#include <cmath>

namespace bhscat {

Wavenumber complex_wavenumber(double k, double sigma) {
  if (!(k > 0.0)) throw std::domain_error("complex_wavenumber: k must be > 0");
  if (!(sigma >= 0.0)) throw std::domain_error("complex_wavenumber: sigma must be >= 0");

  Wavenumber wn;
  wn.k = k;
  wn.sigma = sigma;

  if (sigma == 0.0) {
    // kappa^4 = k^2 exactly, so kappa = sqrt(k).
    wn.kappa_r = std::sqrt(k);
    wn.kappa_i = 0.0;
    wn.kappa = cplx(wn.kappa_r, 0.0);
    return wn;
  }

  // A = sqrt(k^4 + sigma^2 k^2) = |kappa^4|, keeping the hypot form for range safety.
  const double A = std::hypot(k * k, sigma * k);
  // kappa_r^2 = (A^2/16)^(1/4) + ((A + k^2)/8)^(1/2), all additions, no cancellation.
  const double kr2 = 0.5 * std::sqrt(A) + std::sqrt((A + k * k) / 8.0);
  const double kr = std::sqrt(kr2);
  // kappa_i^2 = (A - k^2) / (8 kappa_r^2) with A - k^2 = sigma^2 k^2 / (A + k^2).
  const double ki2 = (sigma * sigma * k * k) / ((A + k * k) * 8.0 * kr2);
  const double ki = std::sqrt(ki2);

  wn.kappa_r = kr;
  wn.kappa_i = ki;
  wn.kappa = cplx(kr, ki);
  return wn;
}

double k_from_kappa_r(double kappa_r, double sigma) {
  if (!(kappa_r > 0.0)) throw std::domain_error("k_from_kappa_r: kappa_r must be > 0");
  if (sigma == 0.0) return kappa_r * kappa_r;

  // kappa_r(k) is strictly increasing; bracket then bisect in log k.
  double lo = kappa_r * kappa_r, hi = lo;
  while (complex_wavenumber(lo, sigma).kappa_r > kappa_r) lo *= 0.5;
  while (complex_wavenumber(hi, sigma).kappa_r < kappa_r) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (complex_wavenumber(mid, sigma).kappa_r < kappa_r)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace bhscat

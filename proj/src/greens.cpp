#include "bhscat/greens.hpp"

#include <cmath>

namespace bhscat {

cplx phi_diagonal(const Wavenumber& wn, int dim) {
  if (dim == 2) return cplx(0, -1) / (8.0 * wn.kappa * wn.kappa);
  if (dim == 3) return -cplx(1, 1) / (8.0 * pi * wn.kappa);
  throw std::domain_error("phi_diagonal: dim must be 2 or 3");
}

cplx phi_r(double r, const Wavenumber& wn, int dim) {
  if (dim != 2 && dim != 3) throw std::domain_error("phi_r: dim must be 2 or 3");
  if (r == 0.0) return phi_diagonal(wn, dim);
  const cplx kappa = wn.kappa;
  const cplx kr = kappa * r;
  if (dim == 3) {
    return -(std::exp(cplx(0, 1) * kr) - std::exp(-kr)) / (8.0 * pi * kappa * kappa * r);
  }
  // H_0^(1)(i kappa r) = -(2i/pi) K_0(kappa r); Re(kappa r) > 0 keeps the
  // Macdonald argument in sector even when kappa_i > 0.
  const cplx h = hankel1(0, kr);
  const cplx kmac = macdonald(0, kr);
  return cplx(0, -1) / (8.0 * kappa * kappa) * (h + cplx(0, 2.0 / pi) * kmac);
}

cplx asym_coeff(int j) {
  if (j < 0) throw std::domain_error("asym_coeff: j must be >= 0");
  // C_0 = sqrt(2/pi) e^{-i pi/4}; C_j / C_{j-1} = -i (2j-1)^2 / (8j).
  cplx c = std::sqrt(2.0 / pi) * std::exp(cplx(0, -0.25 * pi));
  for (int l = 1; l <= j; ++l) c *= cplx(0, -1) * double((2 * l - 1) * (2 * l - 1)) / (8.0 * l);
  return c;
}

cplx phi_truncated(double r, const Wavenumber& wn, int terms_n) {
  if (terms_n < 0) throw std::domain_error("phi_truncated: N must be >= 0");
  if (r == 0.0) throw SingularityError("phi_truncated: expansion diverges at r = 0");
  const cplx kappa = wn.kappa;
  const cplx kr = kappa * r;
  const cplx eikr = std::exp(cplx(0, 1) * kr);
  const cplx emkr = std::exp(-kr);
  const cplx inv8k2 = 1.0 / (8.0 * kappa * kappa);
  const cplx sqrt_kr = std::sqrt(kr);

  cplx sum = 0.0;
  cplx cj = std::sqrt(2.0 / pi) * std::exp(cplx(0, -0.25 * pi));  // C_j
  cplx krpow = sqrt_kr;                                           // (kappa r)^{j+1/2}
  cplx half_pow = std::exp(cplx(0, 0.25 * pi));                   // i^{1/2 - j}
  for (int j = 0; j <= terms_n; ++j) {
    sum += cj / krpow * (cplx(0, 1) * eikr - half_pow * emkr);
    cj *= cplx(0, -1) * double((2 * j + 1) * (2 * j + 1)) / (8.0 * (j + 1));
    krpow *= kr;
    half_pow *= cplx(0, -1);
  }
  return -inv8k2 * sum;
}

}  // namespace bhscat

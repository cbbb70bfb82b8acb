#include "bhscat/specfun.hpp"

#include <cmath>

namespace bhscat {

namespace {

using lcplx = std::complex<long double>;
constexpr long double euler_gamma = 0.57721566490153286060651209008240243L;
constexpr long double lpi = 3.14159265358979323846264338327950288L;

void check_config(const SpecFunConfig& cfg) {
  if (!(cfg.crossover_radius > 0.0))
    throw std::domain_error("SpecFunConfig: crossover_radius must be > 0");
  if (cfg.series_terms < 1 || cfg.asym_terms < 1)
    throw std::domain_error("SpecFunConfig: term caps must be >= 1");
}

// Ascending series, J_nu + i Y_nu with the log on the principal branch.
// Summed in long double: H^(1) decays like e^{-Im z} while J and Y grow like
// e^{+Im z}, so the combination loses e^{2 Im z} eps to cancellation near the
// crossover; the extended mantissa keeps the loss below 2e-10 there.
cplx hankel1_series(int nu, cplx zd, int max_terms) {
  const lcplx z(zd.real(), zd.imag());
  const lcplx q = -0.25L * z * z;  // common ratio factor (-z^2/4)
  const lcplx lg = std::log(0.5L * z);

  if (nu == 0) {
    lcplx j0 = 0.0L, ysum = 0.0L;
    lcplx t = 1.0L;  // (-z^2/4)^j / (j!)^2
    long double hj = 0.0L;
    for (int j = 0; j < max_terms; ++j) {
      j0 += t;
      ysum += t * hj;  // sum (-1)^j H_j (z^2/4)^j / (j!)^2, H_0 = 0
      t *= q / (long double)((j + 1) * (j + 1));
      hj += 1.0L / (j + 1);
      if (std::abs(t) < 1e-22L * (std::abs(j0) + 1e-300L)) break;
    }
    const lcplx y0 = (2.0L / lpi) * ((lg + euler_gamma) * j0 - ysum);
    const lcplx h = j0 + lcplx(0, 1) * y0;
    return cplx(double(h.real()), double(h.imag()));
  }

  // nu == 1
  lcplx j1s = 0.0L, ysum = 0.0L;
  lcplx t = 1.0L;  // (-z^2/4)^j / (j! (j+1)!)
  long double hj = 0.0L, hj1 = 1.0L;
  for (int j = 0; j < max_terms; ++j) {
    j1s += t;
    ysum += t * (hj + hj1 - 2.0L * euler_gamma);
    t *= q / (long double)((j + 1) * (j + 2));
    hj += 1.0L / (j + 1);
    hj1 += 1.0L / (j + 2);
    if (std::abs(t) < 1e-22L * (std::abs(j1s) + 1e-300L)) break;
  }
  const lcplx j1 = 0.5L * z * j1s;
  const lcplx y1 = (2.0L / lpi) * lg * j1 - 2.0L / (lpi * z) - (z / (2.0L * lpi)) * ysum;
  const lcplx h = j1 + lcplx(0, 1) * y1;
  return cplx(double(h.real()), double(h.imag()));
}

// Exponential expansion H_nu ~ sqrt(2/(pi z)) e^{i(z - nu pi/2 - pi/4)} sum i^j a_j / z^j,
// valid on the whole supported sector.
cplx hankel1_asym(int nu, cplx z, int terms) {
  cplx sum = 0.0;
  double a = 1.0;            // a_j(nu)
  cplx ipow = 1.0, zpow = 1.0;  // i^j, z^j
  for (int j = 0; j < terms; ++j) {
    sum += ipow * a / zpow;
    a *= double(4 * nu * nu - (2 * j + 1) * (2 * j + 1)) / (8.0 * (j + 1));
    ipow *= cplx(0, 1);
    zpow *= z;
  }
  const cplx omega = z - cplx(0.5 * nu * pi + 0.25 * pi, 0.0);
  return std::sqrt(2.0 / (pi * z)) * std::exp(cplx(0, 1) * omega) * sum;
}

}  // namespace

cplx hankel1(int nu, cplx z, const SpecFunConfig& cfg) {
  check_config(cfg);
  if (nu != 0 && nu != 1) throw std::domain_error("hankel1: order must be 0 or 1");
  if (z == cplx(0.0, 0.0)) throw SingularityError("hankel1: z = 0");
  if (z.real() < 0.0 && z.imag() < 0.0)
    throw std::domain_error("hankel1: argument outside the supported sector");
  if (std::abs(z) < cfg.crossover_radius) return hankel1_series(nu, z, cfg.series_terms);
  return hankel1_asym(nu, z, cfg.asym_terms);
}

cplx macdonald(int nu, cplx z, const SpecFunConfig& cfg) {
  if (nu != 0 && nu != 1) throw std::domain_error("macdonald: order must be 0 or 1");
  if (!(z.real() > 0.0)) throw std::domain_error("macdonald: Re(z) must be > 0");
  const cplx iz = cplx(-z.imag(), z.real());
  const cplx ipow = nu == 0 ? cplx(0, 1) : cplx(-1, 0);  // i^{nu+1}
  return 0.5 * pi * ipow * hankel1(nu, iz, cfg);
}

}  // namespace bhscat

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bhscat/util.hpp"
#include "bhscat/wavenumber.hpp"

using namespace bhscat;

TEST_CASE("lossless short-circuit") {
  const auto w4 = complex_wavenumber(4.0, 0.0);
  CHECK(w4.kappa_r == 2.0);
  CHECK(w4.kappa_i == 0.0);
  CHECK(w4.kappa == cplx(2.0, 0.0));

  const auto w1 = complex_wavenumber(1.0, 0.0);
  CHECK(w1.kappa == cplx(1.0, 0.0));
}

TEST_CASE("high-frequency limits at k = 1e6, sigma = 1") {
  const auto w = complex_wavenumber(1e6, 1.0);
  const double rk = std::sqrt(1e6);
  CHECK(w.kappa_r / rk > 0.999);
  CHECK(w.kappa_r / rk < 1.001);
  CHECK(rk * w.kappa_i > 0.2475);
  CHECK(rk * w.kappa_i < 0.2525);
}

TEST_CASE("defining quartic residual at (7, 3)") {
  const auto w = complex_wavenumber(7.0, 3.0);
  const cplx k4 = std::pow(w.kappa, 4);
  CHECK(std::abs(k4 - cplx(49.0, 21.0)) < 1e-10);
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(complex_wavenumber(0.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(complex_wavenumber(-1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(complex_wavenumber(1.0, -0.5), std::domain_error);
}

TEST_CASE("quartic residual over random (k, sigma) pairs") {
  RngStream rng(42);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double k = std::exp(std::log(1e-3) + rng.uniform() * std::log(1e12));
    const double sigma = rng.uniform() < 0.1 ? 0.0 : 1e3 * rng.uniform();
    const auto w = complex_wavenumber(k, sigma);
    CHECK(w.kappa_r > 0.0);
    CHECK(w.kappa_i >= 0.0);
    if (sigma == 0.0) CHECK(w.kappa_i == 0.0);
    const cplx target(k * k, sigma * k);
    const cplx k2 = w.kappa * w.kappa;
    const double rel = std::abs(k2 * k2 - target) / std::abs(target);
    worst = std::max(worst, rel);
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("nested radicals reproduce kappa_r and kappa_i directly") {
  // The direct difference of radicals cancels catastrophically for small
  // sigma/k; evaluate it in long double and only compare where the direct
  // route retains 1e-12 itself.
  RngStream rng(7);
  for (int i = 0; i < 200; ++i) {
    const double k = std::exp(std::log(0.1) + rng.uniform() * std::log(1e6));
    const double sigma = 1e2 * rng.uniform();
    const auto w = complex_wavenumber(k, sigma);
    const long double kl = k, sl = sigma;
    const long double A = std::sqrt(kl * kl * kl * kl + sl * sl * kl * kl);
    const long double t1 = std::pow(A * A / 16.0L, 0.25L);
    const long double t2 = std::sqrt((A + kl * kl) / 8.0L);
    const double kr_direct = double(std::sqrt(t1 + t2));
    CHECK(std::abs(w.kappa_r - kr_direct) <= 1e-12 * kr_direct);
    const long double inner = t1 - t2;
    if (inner > 1e-6L * t1) {
      const double ki_direct = double(std::sqrt(inner));
      CHECK(std::abs(w.kappa_i - ki_direct) <= 1e-12 * ki_direct);
    }
  }
}

TEST_CASE("monotone limits in k for fixed sigma") {
  const double sigma = 3.0;
  std::vector<double> err_r, err_i;
  for (int e = 2; e <= 8; ++e) {
    const double k = std::pow(10.0, e);
    const auto w = complex_wavenumber(k, sigma);
    err_r.push_back(std::abs(w.kappa_r / std::sqrt(k) - 1.0));
    err_i.push_back(std::abs(std::sqrt(k) * w.kappa_i - sigma / 4.0));
  }
  // Strict decrease over the last four points, with a floor of a few ulps for
  // the kappa_r track whose error crosses machine epsilon near k = 1e8.
  for (std::size_t i = err_r.size() - 4; i + 1 < err_r.size(); ++i) {
    CHECK((err_r[i + 1] < err_r[i] || err_r[i + 1] < 4e-16));
    CHECK(err_i[i + 1] < err_i[i]);
  }
}

TEST_CASE("continuity at sigma -> 0+") {
  const double k = 5.0;
  // |kappa(k, sigma) - sqrt(k)| <= C sigma: slope fit in log-log near 1.
  std::vector<double> lx, ly;
  for (double sigma = 1e-10; sigma <= 1.1e-6; sigma *= 10.0) {
    const auto w = complex_wavenumber(k, sigma);
    lx.push_back(std::log(sigma));
    ly.push_back(std::log(std::abs(w.kappa - cplx(std::sqrt(k), 0.0))));
  }
  const auto fit = fit_line(lx, ly);
  CHECK(fit.slope == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("k_from_kappa_r inverts the dispersion relation") {
  for (double sigma : {0.0, 0.7, 5.0}) {
    for (double kr : {0.5, 2.0, 30.0}) {
      const double k = k_from_kappa_r(kr, sigma);
      CHECK(complex_wavenumber(k, sigma).kappa_r == doctest::Approx(kr).epsilon(1e-12));
    }
  }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "bhscat/estimator.hpp"
#include "bhscat/util.hpp"

using namespace bhscat;
using doctest::Approx;

namespace {

Box unit_square() {
  Box d;
  d.dim = 2;
  d.lo = Point{0, 0, 0};
  d.hi = Point{1, 1, 0};
  return d;
}

GridSpec small_grid() {
  GridSpec g;
  g.dim = 2;
  g.origin = Point{-0.75, -0.75, 0};
  g.h = 1.0 / 16.0;
  g.n = {40, 40, 1};
  return g;
}

StrengthProfile test_profile() {
  Bump b;
  b.center = Point{0.5, 0.5, 0};
  b.radius = 0.45;
  b.amplitude = 1.0;
  b.core = 0.4;
  return StrengthProfile(2, unit_square(), {b});
}

// Records with |us|^2 = f(kappa_r) on a uniform kappa grid (sigma = 0).
std::vector<SweepRecord> synthetic_records(const std::vector<Point>& points, double kap_lo,
                                           double kap_hi, int n,
                                           const std::function<double(double)>& f,
                                           int realizations = 1) {
  std::vector<SweepRecord> recs;
  for (const auto& x : points)
    for (int i = 0; i < n; ++i) {
      const double kap = kap_lo + (kap_hi - kap_lo) * i / (n - 1);
      for (int r = 0; r < realizations; ++r) {
        SweepRecord rec;
        rec.x = x;
        rec.wn = complex_wavenumber(kap * kap, 0.0);
        rec.k = rec.wn.k;
        rec.us = std::sqrt(f(kap));
        rec.realization = r;
        recs.push_back(rec);
      }
    }
  return recs;
}

}  // namespace

TEST_CASE("band construction") {
  BandSpec band;
  band.kappa_space = true;
  band.lo = 1.0;
  band.hi = 10.0;
  band.per_decade = 8;
  const auto ks = band_k_values(band, 0.7);
  CHECK(int(ks.size()) == 9);
  CHECK(complex_wavenumber(ks.front(), 0.7).kappa_r == Approx(1.0).epsilon(1e-10));
  CHECK(complex_wavenumber(ks.back(), 0.7).kappa_r == Approx(10.0).epsilon(1e-10));

  BandSpec kband;
  kband.kappa_space = false;
  kband.lo = 1.0;
  kband.hi = 4.0;
  kband.dk = 0.5;
  const auto k2 = band_k_values(kband, 0.0);
  CHECK(int(k2.size()) == 7);
  CHECK(k2[1] == Approx(1.5));
  CHECK_THROWS_AS(band_k_values(BandSpec{true, -1.0, 2.0, 8, 0.5}, 0.0), ConfigError);
}

TEST_CASE("sweep bookkeeping and zero potential") {
  const auto fg = small_grid();
  StrengthProfile zero(2, unit_square(), {});
  const auto ens = make_ensemble(zero, 1.5, fg, 1, 3, 1);

  SweepRequest req;
  req.points = {Point{2.0, 0.5, 0}, Point{0.5, 2.1, 0}};
  req.band = BandSpec{true, 2.0, 6.0, 10, 0.5};
  req.sigma = 0.0;
  req.solver.diagnostics = true;
  req.threads = 2;
  const auto recs = frequency_sweep(ens, unit_square(), req);

  const std::size_t n_freq = band_k_values(req.band, 0.0).size();
  CHECK(recs.size() == req.points.size() * n_freq * ens.size());
  for (const auto& r : recs) {
    CHECK(std::abs(r.us) == 0.0);
    CHECK(std::abs(r.u1) == 0.0);
    CHECK(std::abs(r.u2) == 0.0);
  }

  const auto T = estimate_T_ensemble(recs, 1.5, 2);
  for (double t : T.T_hat) CHECK(t == 0.0);
}

TEST_CASE("single point and frequency matches solve_direct") {
  const auto fg = small_grid();
  const auto mu = test_profile();
  const auto ens = make_ensemble(mu, 1.5, fg, 9, 1, 1);
  const Point x{2.2, 0.7, 0};

  SweepRequest req;
  req.points = {x};
  req.band = BandSpec{true, 4.0, 4.4, 64, 0.5};
  req.sigma = 0.0;
  req.threads = 1;
  const auto recs = frequency_sweep(ens, unit_square(), req);
  REQUIRE(recs.size() >= 1);

  const auto grid = make_scatter_grid(fg, unit_square());
  const auto sol = solve_direct(ens[0], grid, x, {x}, recs[0].wn);
  CHECK(std::abs(recs[0].us - sol.receivers[0].us) <= 1e-9 * std::abs(sol.receivers[0].us));
}

TEST_CASE("ensemble estimator weight exponents") {
  // m + 14 - 2d: 12 for (d=2, m=2), 11 for (d=3, m=3). Inject
  // |us|^2 = c kappa^-w; the weighted integrand is constant and the
  // band-normalized trapezoid returns c exactly.
  const std::vector<Point> pts = {Point{2.0, 0.5, 0}};
  for (auto [m, d, w] : {std::tuple{2.0, 2, 12.0}, std::tuple{3.0, 3, 11.0},
                         std::tuple{1.5, 2, 11.5}}) {
    const double c = 3.25;
    auto recs = synthetic_records(pts, 1.0, 9.0, 33,
                                  [&](double kap) { return c * std::pow(kap, -w); }, 4);
    const auto T = estimate_T_ensemble(recs, m, d);
    CHECK(T.T_hat[0] == Approx(c).epsilon(1e-12));
    CHECK(T.stderr_[0] == Approx(0.0));
  }
}

TEST_CASE("single-realization estimator") {
  const std::vector<Point> pts = {Point{2.0, 0.5, 0}};

  SUBCASE("weight exponent (m+13)/2 - d via injection") {
    // (m+13)/2 - d: 11/2 for (d=2, m=2), 5 for (d=3, m=3).
    for (auto [m, d, w] : {std::tuple{2.0, 2, 5.5}, std::tuple{3.0, 3, 5.0}}) {
      const double c = 1.75;
      std::vector<SweepRecord> recs;
      const int n = 2001;
      for (int i = 0; i < n; ++i) {
        const double k = 1.0 + (1600.0 - 1.0) * i / (n - 1);
        SweepRecord rec;
        rec.x = pts[0];
        rec.wn = complex_wavenumber(k, 0.0);
        rec.k = k;
        rec.us = std::sqrt(c * std::pow(k, -w));
        recs.push_back(rec);
      }
      const auto T = estimate_T_single(recs, m, d);
      const double want = c * (1600.0 - 1.0) / (2.0 * std::sqrt(1600.0));
      CHECK(T.T_hat[0] == Approx(want).epsilon(1e-12));
    }
  }

  SUBCASE("lossy media rejected") {
    std::vector<SweepRecord> recs;
    for (int i = 0; i < 4; ++i) {
      SweepRecord rec;
      rec.x = pts[0];
      rec.k = 1.0 + i;
      rec.wn = complex_wavenumber(rec.k, 0.5);
      rec.us = 1.0;
      recs.push_back(rec);
    }
    CHECK_THROWS_AS(estimate_T_single(recs, 2.0, 2), ModeError);
  }

  SUBCASE("multiple realizations rejected") {
    auto recs = synthetic_records(pts, 1.0, 4.0, 16, [](double) { return 1.0; }, 2);
    CHECK_THROWS_AS(estimate_T_single(recs, 2.0, 2), ModeError);
  }

  SUBCASE("nonuniform k grid rejected") {
    std::vector<SweepRecord> recs;
    for (double k : {1.0, 2.0, 4.5, 8.0}) {
      SweepRecord rec;
      rec.x = pts[0];
      rec.k = k;
      rec.wn = complex_wavenumber(k, 0.0);
      rec.us = 1.0;
      recs.push_back(rec);
    }
    CHECK_THROWS_AS(estimate_T_single(recs, 2.0, 2), ConfigError);
  }
}

TEST_CASE("change-of-variables consistency between the two weightings") {
  // Smooth |us|^2 = f(kappa): the kappa-form (1/K) int_1^K kappa^{m+14-2d} f
  // and the k-form (1/2K) int_1^{K^2} k^{(m+13)/2-d} f(sqrt k) agree
  // analytically; the two quadrature paths agree to 1e-3.
  const double m = 1.5;
  const int d = 2;
  const double K = 20.0;
  auto f = [](double kap) { return std::pow(kap, -11.5) * (2.0 + std::sin(3.0 * kap)); };
  const std::vector<Point> pts = {Point{2.0, 0.5, 0}};

  auto ens_recs = synthetic_records(pts, 1.0, K, 4000, f, 1);
  const auto Tens = estimate_T_ensemble(ens_recs, m, d);
  const double kappa_form = Tens.T_hat[0] * (K - 1.0) / K;

  std::vector<SweepRecord> single;
  const int n = 160000;
  for (int i = 0; i < n; ++i) {
    const double k = 1.0 + (K * K - 1.0) * i / (n - 1);
    SweepRecord rec;
    rec.x = pts[0];
    rec.wn = complex_wavenumber(k, 0.0);
    rec.k = k;
    rec.us = std::sqrt(f(std::sqrt(k)));
    single.push_back(rec);
  }
  const double k_form = estimate_T_single(single, m, d).T_hat[0];
  CHECK(k_form == Approx(kappa_form).epsilon(1e-3));
}

TEST_CASE("estimator linearity over adjacent bands") {
  const std::vector<Point> pts = {Point{2.0, 0.5, 0}};
  auto f = [](double kap) { return std::pow(kap, -10.0) * (1.0 + 0.3 * std::cos(kap)); };
  auto lo = synthetic_records(pts, 1.0, 3.0, 21, f);
  auto hi = synthetic_records(pts, 3.0, 7.0, 41, f);
  auto all = lo;
  // Shared endpoint appears once in the union.
  all.insert(all.end(), hi.begin() + 1, hi.end());

  const double m = 1.5;
  const double Tlo = estimate_T_ensemble(lo, m, 2).T_hat[0];
  const double Thi = estimate_T_ensemble(hi, m, 2).T_hat[0];
  const double Tall = estimate_T_ensemble(all, m, 2).T_hat[0];
  CHECK(Tall * 6.0 == Approx(Tlo * 2.0 + Thi * 4.0).epsilon(1e-12));
}

TEST_CASE("permutation invariance of the reduction") {
  const std::vector<Point> pts = {Point{2.0, 0.5, 0}, Point{0.5, 2.0, 0}};
  auto f = [](double kap) { return std::pow(kap, -9.0) * (1.0 + 0.1 * std::sin(kap)); };
  auto recs = synthetic_records(pts, 1.0, 8.0, 29, f, 3);
  const auto T1 = estimate_T_ensemble(recs, 1.5, 2);
  std::mt19937 rng(99);
  std::shuffle(recs.begin(), recs.end(), rng);
  const auto T2 = estimate_T_ensemble(recs, 1.5, 2);
  REQUIRE(T1.T_hat.size() == T2.T_hat.size());
  for (std::size_t i = 0; i < T1.T_hat.size(); ++i) {
    CHECK(T1.T_hat[i] == T2.T_hat[i]);
    CHECK(T1.points[i].x == T2.points[i].x);
  }
}

TEST_CASE("reference T") {
  const auto mu = test_profile();

  SUBCASE("x inside D rejected, zero strength integrates to zero") {
    CHECK_THROWS_AS(reference_T(mu, Point{0.5, 0.5, 0}, 2), std::domain_error);
    StrengthProfile zero(2, unit_square(), {});
    CHECK(reference_T(zero, Point{2.0, 0.5, 0}, 2) == 0.0);
  }

  SUBCASE("quadrature is converged") {
    const Point x{2.0, 0.5, 0};
    const double a = reference_T(mu, x, 2, nullptr, 300);
    const double b = reference_T(mu, x, 2, nullptr, 600);
    CHECK(a == Approx(b).epsilon(1e-6));
  }

  SUBCASE("shrinking bump approaches the point-mass law") {
    // c_d M / |x - z0|^{2(d-1)} with the bump mass M from a fine midpoint sum.
    const Point z0{0.5, 0.5, 0};
    const Point x{2.0, 0.5, 0};
    Bump b;
    b.center = z0;
    b.radius = 0.05;  // dist/20 = 0.075
    b.amplitude = 1.0;
    b.core = 0.0;
    StrengthProfile tiny(2, unit_square(), {b});
    double mass = 0.0;
    const int nq = 1200;
    const double h = 1.0 / nq;
    for (int i = 0; i < nq; ++i)
      for (int j = 0; j < nq; ++j)
        mass += tiny.eval(Point{(i + 0.5) * h, (j + 0.5) * h, 0}) * h * h;
    const double want = (1.0 / 4096.0) * mass / std::pow(distance(x, z0), 2.0);
    CHECK(reference_T(tiny, x, 2, nullptr, 800) == Approx(want).epsilon(0.01));
  }

  SUBCASE("damping attenuates and vanishes at high k") {
    const Point x{2.0, 0.5, 0};
    const double plain = reference_T(mu, x, 2);
    const auto low = complex_wavenumber(4.0, 1.0);
    const auto high = complex_wavenumber(1e8, 1.0);
    const double damped_low = reference_T(mu, x, 2, &low);
    const double damped_high = reference_T(mu, x, 2, &high);
    CHECK(damped_low < plain);
    CHECK(damped_high == Approx(plain).epsilon(1e-3));
  }
}

TEST_CASE("born diagnostics") {
  const auto fg = small_grid();

  SUBCASE("zero potential: all trajectories vanish") {
    StrengthProfile zero(2, unit_square(), {});
    const auto ens = make_ensemble(zero, 1.5, fg, 1, 2, 1);
    SweepRequest req;
    req.points = {Point{2.0, 0.5, 0}};
    req.band = BandSpec{true, 2.0, 8.0, 8, 0.5};
    req.sigma = 1.0;
    req.solver.diagnostics = true;
    const auto recs = frequency_sweep(ens, unit_square(), req);
    const auto rep = born_diagnostics(recs, zero, 1.5, 2);
    for (std::size_t i = 0; i < rep.kappa.size(); ++i) {
      CHECK(rep.u1_weighted[i] == 0.0);
      CHECK(rep.u2_weighted[i] == 0.0);
      CHECK(rep.b_weighted[i] == 0.0);
    }
  }

  SUBCASE("records without diagnostics are rejected") {
    const auto mu = test_profile();
    const auto ens = make_ensemble(mu, 1.5, fg, 2, 1, 1);
    SweepRequest req;
    req.points = {Point{2.0, 0.5, 0}};
    req.band = BandSpec{true, 2.0, 4.0, 4, 0.5};
    req.sigma = 0.0;
    req.solver.diagnostics = false;
    const auto recs = frequency_sweep(ens, unit_square(), req);
    CHECK_THROWS_AS(born_diagnostics(recs, mu, 1.5, 2), ConfigError);
  }
}

TEST_CASE("sweep failures carry context") {
  const auto fg = small_grid();
  const auto mu = test_profile();
  const auto ens = make_ensemble(mu, 1.5, fg, 3, 1, 1);
  SweepRequest req;
  req.points = {Point{0.5, 0.5, 0}};  // inside D
  req.band = BandSpec{true, 2.0, 4.0, 4, 0.5};
  CHECK_THROWS_AS(frequency_sweep(ens, unit_square(), req), std::domain_error);
}

#include "bhscat/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace bhscat {

namespace {

bool point_less(const Point& a, const Point& b) {
  if (a.x != b.x) return a.x < b.x;
  if (a.y != b.y) return a.y < b.y;
  return a.z < b.z;
}

bool point_eq(const Point& a, const Point& b) {
  return a.x == b.x && a.y == b.y && a.z == b.z;
}

void sort_records(std::vector<SweepRecord>& r) {
  std::sort(r.begin(), r.end(), [](const SweepRecord& a, const SweepRecord& b) {
    if (!point_eq(a.x, b.x)) return point_less(a.x, b.x);
    if (a.k != b.k) return a.k < b.k;
    return a.realization < b.realization;
  });
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i)
    acc += 0.5 * (x[i + 1] - x[i]) * (y[i] + y[i + 1]);
  return acc;
}

}  // namespace

std::vector<double> band_k_values(const BandSpec& band, double sigma) {
  if (!(band.lo > 0.0 && band.hi > band.lo)) throw ConfigError("band: need 0 < lo < hi");
  std::vector<double> ks;
  if (band.kappa_space) {
    if (band.per_decade < 1) throw ConfigError("band: per_decade must be >= 1");
    const double decades = std::log10(band.hi / band.lo);
    const int n = std::max(2, int(std::lround(decades * band.per_decade)) + 1);
    // Uniform in kappa_r, mapped through the dispersion relation.
    for (int i = 0; i < n; ++i) {
      const double kr = band.lo + (band.hi - band.lo) * i / (n - 1);
      ks.push_back(k_from_kappa_r(kr, sigma));
    }
  } else {
    if (!(band.dk > 0.0)) throw ConfigError("band: dk must be > 0");
    const int n = int(std::floor((band.hi - band.lo) / band.dk + 1e-9)) + 1;
    for (int i = 0; i < n; ++i) ks.push_back(band.lo + i * band.dk);
  }
  return ks;
}

std::vector<SweepRecord> frequency_sweep(const std::vector<FieldRealization>& ensemble,
                                         const Box& domain, const SweepRequest& req) {
  if (ensemble.empty()) throw ConfigError("frequency_sweep: empty ensemble");
  if (req.points.empty()) throw ConfigError("frequency_sweep: no measurement points");
  for (const auto& f : ensemble)
    if (!f.grid.same_lattice(ensemble.front().grid))
      throw ConfigError("frequency_sweep: realizations on mismatched lattices");

  const ScatterGrid grid = make_scatter_grid(ensemble.front().grid, domain);
  for (const auto& x : req.points)
    if (grid.domain.dist(x) <= 0.0)
      throw std::domain_error("frequency_sweep: points must be at positive distance from D");

  const std::vector<double> ks = band_k_values(req.band, req.sigma);
  const std::size_t R = ensemble.size(), P = req.points.size(), NK = ks.size();

  std::vector<std::vector<double>> rhos(R);
  for (std::size_t r = 0; r < R; ++r) rhos[r] = restrict_to_grid(ensemble[r], grid);

  std::vector<SweepRecord> records(NK * P * R);

  auto run_one_k = [&](std::size_t ik) {
    const double k = ks[ik];
    const Wavenumber wn = complex_wavenumber(k, req.sigma);
    const bool fast = req.solver.method == SolverOptions::Method::fast_iterative;
    std::optional<FastScatterOp> op;
    if (fast || req.solver.diagnostics) op.emplace(grid, wn);

    for (std::size_t ip = 0; ip < P; ++ip) {
      const Point& x = req.points[ip];
      const Eigen::VectorXcd phi_x = source_vector(grid, x, wn);

      for (std::size_t ir = 0; ir < R; ++ir) {
        SweepRecord rec;
        rec.x = x;
        rec.k = k;
        rec.wn = wn;
        rec.realization = int(ir);
        try {
          const auto& rho = rhos[ir];
          Eigen::VectorXcd u;
          if (fast) {
            u = solve_iterative(*op, rho, phi_x, req.solver.tol, req.solver.max_iter).u;
          } else {
            const FieldSolution sol = solve_direct(ensemble[ir], grid, x, {}, wn);
            u = sol.u_on_grid;
          }
          rec.us = receiver_eval(grid, phi_x, rho, u);
          if (req.solver.diagnostics) {
            Eigen::VectorXcd v1;
            op->apply(rho, phi_x, v1);  // K u0 on the grid (u0 = phi_x since y = x)
            rec.u1 = receiver_eval(grid, phi_x, rho, phi_x);
            rec.u2 = receiver_eval(grid, phi_x, rho, v1);
            rec.born_residual = rec.us - rec.u1 - rec.u2;
            rec.has_diagnostics = true;
          }
        } catch (const std::exception& e) {
          throw ResonanceError("sweep failure at x=(" + format_double(x.x) + "," +
                               format_double(x.y) + "), k=" + format_double(k) +
                               ", realization " + std::to_string(ir) + ": " + e.what());
        }
        records[(ik * P + ip) * R + ir] = std::move(rec);
      }
    }
  };

  parallel_for(NK, run_one_k, req.threads);
  return records;
}

StrengthData estimate_T_ensemble(std::vector<SweepRecord> records, double m, int d) {
  if (records.empty()) throw ConfigError("estimate_T_ensemble: no records");
  sort_records(records);

  // Collect the common kappa_r grid and realizations per point.
  std::vector<double> kappas;
  std::vector<int> reals;
  for (const auto& r : records) {
    if (point_eq(r.x, records.front().x) && r.realization == records.front().realization)
      kappas.push_back(r.wn.kappa_r);
    if (point_eq(r.x, records.front().x) && r.k == records.front().k)
      reals.push_back(r.realization);
  }

  std::vector<Point> points;
  for (const auto& r : records)
    if (points.empty() || !point_eq(points.back(), r.x)) points.push_back(r.x);

  const std::size_t NK = kappas.size(), R = reals.size(), P = points.size();
  if (NK < 2) throw ConfigError("estimate_T_ensemble: need at least 2 frequencies");
  if (records.size() != NK * R * P)
    throw ConfigError("estimate_T_ensemble: inconsistent record grid");

  const double w_exp = m + 14.0 - 2.0 * d;
  const double band = kappas.back() - kappas.front();

  StrengthData out;
  out.mode = StrengthData::Mode::ensemble;
  out.points = points;
  out.band_lo = kappas.front();
  out.band_hi = kappas.back();
  out.m = m;
  out.d = d;
  out.sigma = records.front().wn.sigma;

  for (std::size_t p = 0; p < P; ++p) {
    // Per-realization band integrals, then mean and spread over realizations.
    std::vector<double> per_real(R, 0.0);
    for (std::size_t r = 0; r < R; ++r) {
      std::vector<double> integrand(NK);
      for (std::size_t ikap = 0; ikap < NK; ++ikap) {
        const SweepRecord& rec = records[(p * NK + ikap) * R + r];
        if (rec.wn.kappa_r != kappas[ikap] || rec.realization != reals[r])
          throw ConfigError("estimate_T_ensemble: records not on a common (kappa, realization) grid");
        integrand[ikap] = std::pow(rec.wn.kappa_r, w_exp) * std::norm(rec.us);
      }
      per_real[r] = trapezoid(kappas, integrand) / band;
    }
    double mean = 0.0;
    for (double v : per_real) mean += v;
    mean /= double(R);
    double se = 0.0;
    if (R > 1) {
      double var = 0.0;
      for (double v : per_real) var += (v - mean) * (v - mean);
      se = std::sqrt(var / double(R - 1) / double(R));
    }
    out.T_hat.push_back(mean);
    out.stderr_.push_back(se);
    out.flagged.push_back(mean < -3.0 * se);
  }
  return out;
}

StrengthData estimate_T_single(std::vector<SweepRecord> records, double m, int d) {
  if (records.empty()) throw ConfigError("estimate_T_single: no records");
  for (const auto& r : records) {
    if (r.wn.sigma != 0.0)
      throw ModeError("estimate_T_single: the ergodic substitution needs sigma = 0");
    if (r.realization != records.front().realization)
      throw ModeError("estimate_T_single: records span multiple realizations");
  }
  sort_records(records);

  std::vector<Point> points;
  for (const auto& r : records)
    if (points.empty() || !point_eq(points.back(), r.x)) points.push_back(r.x);
  const std::size_t P = points.size();
  const std::size_t NK = records.size() / P;
  if (NK < 2 || records.size() != NK * P)
    throw ConfigError("estimate_T_single: inconsistent record grid");

  // Uniform k grid check.
  const double dk = records[1].k - records[0].k;
  for (std::size_t i = 0; i + 1 < NK; ++i) {
    const double step = records[i + 1].k - records[i].k;
    if (std::abs(step - dk) > 1e-9 * dk)
      throw ConfigError("estimate_T_single: k grid is not uniform");
  }

  const double w_exp = 0.5 * (m + 13.0) - d;
  const double kmax = records[NK - 1].k;
  const double big_k = std::sqrt(kmax);

  StrengthData out;
  out.mode = StrengthData::Mode::single_realization;
  out.points = points;
  out.band_lo = records[0].k;
  out.band_hi = kmax;
  out.m = m;
  out.d = d;
  out.sigma = 0.0;

  for (std::size_t p = 0; p < P; ++p) {
    std::vector<double> ks(NK), integrand(NK);
    for (std::size_t i = 0; i < NK; ++i) {
      const SweepRecord& rec = records[p * NK + i];
      ks[i] = rec.k;
      integrand[i] = std::pow(rec.k, w_exp) * std::norm(rec.us);
    }
    out.T_hat.push_back(trapezoid(ks, integrand) / (2.0 * big_k));
    out.stderr_.push_back(0.0);
    out.flagged.push_back(false);
  }
  return out;
}

namespace {

int default_quad_n(int d) { return d == 2 ? 400 : 96; }

// Distances and mu values over the quadrature lattice covering D.
struct QuadCache {
  std::vector<double> r, muv;
  double weight = 0.0;
};

QuadCache build_quad(const StrengthProfile& mu, const Point& x, int d, int n) {
  const Box D = mu.support();
  if (D.contains(x)) throw std::domain_error("reference_T: x must lie outside D");
  GridSpec q;
  q.dim = d;
  q.origin = D.lo;
  const double len = std::max({D.hi.x - D.lo.x, D.hi.y - D.lo.y, d == 3 ? D.hi.z - D.lo.z : 0.0});
  q.h = len / n;
  q.n = {n, n, d == 3 ? n : 1};
  QuadCache c;
  c.weight = std::pow(q.h, d);
  const std::size_t total = q.count();
  c.r.reserve(total);
  c.muv.reserve(total);
  for (std::size_t i = 0; i < total; ++i) {
    const Point z = q.node(i);
    const double mv = mu.eval(z);
    if (mv == 0.0) continue;
    c.r.push_back(distance(x, z));
    c.muv.push_back(mv);
  }
  return c;
}

double prefactor_cd(int d) { return 1.0 / (4096.0 * std::pow(pi, 4.0 * (d - 2))); }

}  // namespace

double reference_T(const StrengthProfile& mu, const Point& x, int d, const Wavenumber* wn,
                   int quad_n) {
  std::vector<Wavenumber> wns;
  if (wn) wns.push_back(*wn);
  const auto curve = reference_T_curve(mu, x, d, wns, quad_n);
  return curve.front();
}

std::vector<double> reference_T_curve(const StrengthProfile& mu, const Point& x, int d,
                                      const std::vector<Wavenumber>& wns, int quad_n) {
  if (d != 2 && d != 3) throw std::domain_error("reference_T: dim must be 2 or 3");
  const int n = quad_n > 0 ? quad_n : default_quad_n(d);
  const QuadCache c = build_quad(mu, x, d, n);
  const double cd = prefactor_cd(d);
  const double pow_r = 2.0 * (d - 1);

  std::vector<double> out;
  if (wns.empty()) {
    double acc = 0.0;
    for (std::size_t i = 0; i < c.r.size(); ++i)
      acc += c.muv[i] / std::pow(c.r[i], pow_r);
    out.push_back(cd * c.weight * acc);
    return out;
  }
  out.reserve(wns.size());
  for (const auto& w : wns) {
    double acc = 0.0;
    for (std::size_t i = 0; i < c.r.size(); ++i)
      acc += c.muv[i] * std::exp(-4.0 * w.kappa_i * c.r[i]) / std::pow(c.r[i], pow_r);
    const double branch = std::pow(w.kappa_r / std::abs(w.kappa), 2.0 * (7 - d));
    out.push_back(branch * cd * c.weight * acc);
  }
  return out;
}

BornReport born_diagnostics(const std::vector<SweepRecord>& records, const StrengthProfile& mu,
                            double m, int d) {
  if (records.empty()) throw ConfigError("born_diagnostics: no records");
  for (const auto& r : records)
    if (!r.has_diagnostics)
      throw ConfigError("born_diagnostics: records are missing Born diagnostics");

  std::vector<SweepRecord> sorted = records;
  sort_records(sorted);

  std::vector<Point> points;
  for (const auto& r : sorted)
    if (points.empty() || !point_eq(points.back(), r.x)) points.push_back(r.x);

  std::map<double, Wavenumber> kap;
  for (const auto& r : sorted) kap.emplace(r.wn.kappa_r, r.wn);

  BornReport rep;
  std::vector<Wavenumber> wns;
  for (const auto& [kr, w] : kap) {
    rep.kappa.push_back(kr);
    wns.push_back(w);
  }
  const std::size_t NK = rep.kappa.size();
  const double w_exp = m + 14.0 - 2.0 * d;

  // Damped reference averaged over points.
  std::vector<double> ref(NK, 0.0);
  for (const auto& x : points) {
    const auto curve = reference_T_curve(mu, x, d, wns);
    for (std::size_t i = 0; i < NK; ++i) ref[i] += curve[i] / double(points.size());
  }

  std::vector<double> su1(NK, 0.0), su2(NK, 0.0), sb(NK, 0.0);
  std::vector<std::size_t> cnt(NK, 0);
  for (const auto& r : sorted) {
    const std::size_t i =
        std::lower_bound(rep.kappa.begin(), rep.kappa.end(), r.wn.kappa_r) - rep.kappa.begin();
    const double w = std::pow(r.wn.kappa_r, w_exp);
    su1[i] += w * std::norm(r.u1);
    su2[i] += w * std::norm(r.u2);
    sb[i] += w * std::norm(r.born_residual);
    cnt[i] += 1;
  }
  rep.u1_weighted.resize(NK);
  rep.u2_weighted.resize(NK);
  rep.b_weighted.resize(NK);
  rep.u1_reference = ref;
  rep.u1_ratio.resize(NK);
  for (std::size_t i = 0; i < NK; ++i) {
    rep.u1_weighted[i] = su1[i] / double(cnt[i]);
    rep.u2_weighted[i] = su2[i] / double(cnt[i]);
    rep.b_weighted[i] = sb[i] / double(cnt[i]);
    rep.u1_ratio[i] = ref[i] > 0.0 ? rep.u1_weighted[i] / ref[i] : 0.0;
  }

  // Decade band averages: bottom = [kmin, 10 kmin], top = [kmax/10, kmax].
  const double kmin = rep.kappa.front(), kmax = rep.kappa.back();
  auto band_avg = [&](const std::vector<double>& v, double lo, double hi) {
    double acc = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < NK; ++i)
      if (rep.kappa[i] >= lo && rep.kappa[i] <= hi) {
        acc += v[i];
        ++n;
      }
    return n ? acc / double(n) : 0.0;
  };
  rep.u1_ratio_top_decade = band_avg(rep.u1_ratio, kmax / 10.0, kmax);
  const double u2_bot = band_avg(rep.u2_weighted, kmin, 10.0 * kmin);
  const double u2_top = band_avg(rep.u2_weighted, kmax / 10.0, kmax);
  const double b_bot = band_avg(rep.b_weighted, kmin, 10.0 * kmin);
  const double b_top = band_avg(rep.b_weighted, kmax / 10.0, kmax);
  rep.u2_top_over_bottom = u2_bot > 0.0 ? u2_top / u2_bot : 0.0;
  rep.b_top_over_bottom = b_bot > 0.0 ? b_top / b_bot : 0.0;
  return rep;
}

}  // namespace bhscat

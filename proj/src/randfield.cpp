#include "bhscat/randfield.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bhscat/fft.hpp"

namespace bhscat {

namespace {

// C-infinity step: 1 at t = 0, 0 at t = 1, flat at both ends.
double smooth_step_down(double t) {
  if (t <= 0.0) return 1.0;
  if (t >= 1.0) return 0.0;
  const double a = std::exp(-1.0 / (1.0 - t));
  const double b = std::exp(-1.0 / t);
  return a / (a + b);
}

}  // namespace

double Bump::eval(const Point& p) const {
  const double s = distance(p, center) / radius;
  if (s >= 1.0) return 0.0;
  if (s <= core) return amplitude;
  return amplitude * smooth_step_down((s - core) / (1.0 - core));
}

StrengthProfile::StrengthProfile(int dim, Box support, std::vector<Bump> bumps)
    : dim_(dim), support_(std::move(support)), bumps_(std::move(bumps)) {
  if (dim_ != 2 && dim_ != 3) throw ConfigError("StrengthProfile: dim must be 2 or 3");
  support_.dim = dim_;
  for (const auto& b : bumps_) {
    if (!(b.radius > 0.0)) throw ConfigError("StrengthProfile: bump radius must be > 0");
    if (b.amplitude < 0.0) throw ConfigError("StrengthProfile: bump amplitude must be >= 0");
    if (!(b.core >= 0.0 && b.core < 1.0)) throw ConfigError("StrengthProfile: core in [0, 1)");
    // Support containment: the bump ball must stay inside the box.
    const Point& c = b.center;
    const double r = b.radius;
    bool inside = c.x - r >= support_.lo.x && c.x + r <= support_.hi.x &&
                  c.y - r >= support_.lo.y && c.y + r <= support_.hi.y;
    if (dim_ == 3) inside = inside && c.z - r >= support_.lo.z && c.z + r <= support_.hi.z;
    if (!inside) throw ConfigError("StrengthProfile: bump support pokes outside D");
  }
}

StrengthProfile StrengthProfile::uniform(int dim, Box support, double amplitude) {
  if (amplitude < 0.0) throw ConfigError("StrengthProfile: amplitude must be >= 0");
  StrengthProfile p(dim, std::move(support), {});
  p.uniform_amp_ = amplitude;
  return p;
}

double StrengthProfile::eval(const Point& p) const {
  if (!support_.contains(p)) return 0.0;
  if (uniform_amp_ >= 0.0) return uniform_amp_;
  double v = 0.0;
  for (const auto& b : bumps_) v += b.eval(p);
  return v;
}

bool GridSpec::same_lattice(const GridSpec& o) const {
  return dim == o.dim && n == o.n && h == o.h && origin.x == o.origin.x &&
         origin.y == o.origin.y && origin.z == o.origin.z;
}

double default_ir_cutoff(const GridSpec& grid, double m) {
  const int d = grid.dim;
  const double L = std::max({grid.length(0), grid.length(1), d == 3 ? grid.length(2) : 0.0});
  if (m >= double(d) - 1e-9) return pi / (2.0 * L);
  double xic, mass;
  if (d == 2) {
    xic = 2.0 * std::sqrt(pi) / L;
    mass = std::pow(xic, 2.0 - m) / (2.0 * pi * (2.0 - m));
  } else {
    xic = (2.0 * pi / L) * std::cbrt(3.0 / (4.0 * pi));
    mass = std::pow(xic, 3.0 - m) / (2.0 * pi * pi * (3.0 - m));
  }
  return std::pow(std::pow(L, d) * mass, -1.0 / m);
}

std::vector<double> synth_stationary(const GridSpec& grid, double m, double ir_cutoff,
                                     std::uint64_t seed, double* max_imag_leak) {
  const int d = grid.dim;
  const std::size_t total = grid.count();
  const double delta = ir_cutoff > 0.0 ? ir_cutoff : default_ir_cutoff(grid, m);

  std::vector<cplx> buf(total);
  RngStream rng(seed);
  for (std::size_t i = 0; i < total; ++i) buf[i] = rng.normal();

  fftutil::dft(buf.data(), grid.n, d, -1);

  // Filter (delta^2 + |xi|^2)^(-m/4) on the integer frequency lattice.
  const double fac0 = 2.0 * pi / grid.length(0);
  const double fac1 = 2.0 * pi / grid.length(1);
  const double fac2 = d == 3 ? 2.0 * pi / grid.length(2) : 0.0;
  const int n0 = grid.n[0], n1 = grid.n[1], n2 = d == 3 ? grid.n[2] : 1;
  std::size_t idx = 0;
  for (int k = 0; k < n2; ++k) {
    const double xi2k = d == 3 ? fac2 * (k <= n2 / 2 ? k : k - n2) : 0.0;
    for (int j = 0; j < n1; ++j) {
      const double xi1 = fac1 * (j <= n1 / 2 ? j : j - n1);
      for (int i = 0; i < n0; ++i, ++idx) {
        const double xi0 = fac0 * (i <= n0 / 2 ? i : i - n0);
        const double s2 = delta * delta + xi0 * xi0 + xi1 * xi1 + xi2k * xi2k;
        buf[idx] *= std::pow(s2, -0.25 * m);
      }
    }
  }

  fftutil::dft(buf.data(), grid.n, d, +1);

  const double scale = std::pow(grid.h, -0.5 * d) / double(total);
  std::vector<double> out(total);
  double leak = 0.0, mag = 0.0;
  for (std::size_t i = 0; i < total; ++i) {
    out[i] = buf[i].real() * scale;
    leak = std::max(leak, std::abs(buf[i].imag()));
    mag = std::max(mag, std::abs(buf[i].real()));
  }
  if (max_imag_leak) *max_imag_leak = mag > 0.0 ? leak / mag : leak;
  if (mag > 0.0 && leak > 1e-10 * mag)
    throw std::runtime_error("synth_stationary: Hermitian symmetry violated");
  return out;
}

FieldRealization sample_field(const StrengthProfile& mu, double m, const GridSpec& grid,
                              std::uint64_t seed, double ir_cutoff) {
  const int d = mu.dim();
  if (grid.dim != d) throw ConfigError("sample_field: grid dimension mismatch");
  if (!(m > d - 1 && m <= d))
    throw std::domain_error("sample_field: order m must lie in (d-1, d]");

  const Box D = mu.support();
  const Box B = grid.box();
  const double margin_needed = 0.5 * D.diameter();
  const double mz = d == 3 ? std::min(D.lo.z - B.lo.z, B.hi.z - D.hi.z) : margin_needed;
  const double margin = std::min({D.lo.x - B.lo.x, B.hi.x - D.hi.x, D.lo.y - B.lo.y,
                                  B.hi.y - D.hi.y, mz});
  if (margin < margin_needed - 1e-12)
    throw ConfigError("sample_field: synthesis box must contain D with margin >= diam(D)/2");

  FieldRealization f;
  f.grid = grid;
  f.order_m = m;
  f.seed = seed;
  f.ir_cutoff = ir_cutoff > 0.0 ? ir_cutoff : default_ir_cutoff(grid, m);
  f.values = synth_stationary(grid, m, f.ir_cutoff, seed);
  const std::size_t total = grid.count();
  for (std::size_t i = 0; i < total; ++i) {
    const double mv = mu.eval(grid.node(i));
    f.values[i] = mv > 0.0 ? std::sqrt(mv) * f.values[i] : 0.0;
  }
  return f;
}

FieldRealization field_from_function(const GridSpec& grid,
                                     const std::function<double(const Point&)>& fn) {
  FieldRealization f;
  f.grid = grid;
  f.order_m = grid.dim;  // nominal
  f.values.resize(grid.count());
  for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] = fn(grid.node(i));
  return f;
}

std::vector<FieldRealization> make_ensemble(const StrengthProfile& mu, double m,
                                            const GridSpec& grid, std::uint64_t master_seed,
                                            int count, int threads) {
  if (count < 1) throw ConfigError("make_ensemble: count must be >= 1");
  std::vector<FieldRealization> out(count);
  parallel_for(std::size_t(count), [&](std::size_t i) {
    out[i] = sample_field(mu, m, grid, hash_seed(master_seed, i));
  }, threads);
  return out;
}

std::vector<CovarianceEstimate> empirical_covariance(const std::vector<FieldRealization>& ensemble,
                                                     const Point& anchor,
                                                     const std::vector<double>& lags) {
  if (ensemble.size() < 2)
    throw std::invalid_argument("empirical_covariance: need at least 2 realizations");
  const GridSpec& g = ensemble.front().grid;
  for (const auto& f : ensemble) {
    if (!f.grid.same_lattice(g) || f.order_m != ensemble.front().order_m)
      throw std::invalid_argument("empirical_covariance: mismatched grids or parameters");
  }
  const int d = g.dim;
  const std::size_t R = ensemble.size();

  auto snap = [&](double v, double o) { return int(std::floor((v - o) / g.h)); };
  const int ai = snap(anchor.x, g.origin.x);
  const int aj = snap(anchor.y, g.origin.y);
  const int ak = d == 3 ? snap(anchor.z, g.origin.z) : 0;

  std::vector<CovarianceEstimate> out;
  out.reserve(lags.size());
  for (double lag : lags) {
    const int steps = std::max(1, int(std::lround(lag / g.h)));
    std::vector<std::array<int, 3>> dirs = {{steps, 0, 0}, {-steps, 0, 0},
                                            {0, steps, 0}, {0, -steps, 0}};
    if (d == 3) {
      dirs.push_back({0, 0, steps});
      dirs.push_back({0, 0, -steps});
    }
    // Keep only in-bounds directions.
    std::vector<std::size_t> bidx;
    for (const auto& dr : dirs) {
      const int bi = ai + dr[0], bj = aj + dr[1], bk = ak + dr[2];
      if (bi >= 0 && bi < g.n[0] && bj >= 0 && bj < g.n[1] &&
          (d == 2 || (bk >= 0 && bk < g.n[2])))
        bidx.push_back(g.flat(bi, bj, bk));
    }
    const std::size_t a = g.flat(ai, aj, ak);

    // Ensemble means at the anchor and at each shifted node.
    double abar = 0.0;
    std::vector<double> bbar(bidx.size(), 0.0);
    for (const auto& f : ensemble) {
      abar += f.values[a];
      for (std::size_t q = 0; q < bidx.size(); ++q) bbar[q] += f.values[bidx[q]];
    }
    abar /= double(R);
    for (auto& v : bbar) v /= double(R);

    // Per-realization direction-averaged centered products.
    std::vector<double> r(R, 0.0);
    for (std::size_t i = 0; i < R; ++i) {
      const auto& f = ensemble[i];
      double acc = 0.0;
      for (std::size_t q = 0; q < bidx.size(); ++q)
        acc += (f.values[a] - abar) * (f.values[bidx[q]] - bbar[q]);
      r[i] = acc / double(bidx.size());
    }
    const double corr = double(R) / double(R - 1);
    double mean_r = 0.0;
    for (double v : r) mean_r += v;
    mean_r /= double(R);

    CovarianceEstimate e;
    e.lag_requested = lag;
    e.lag = steps * g.h;
    e.estimate = corr * mean_r;
    e.flagged = R < 3;
    if (e.flagged) {
      e.stderr_ = std::numeric_limits<double>::quiet_NaN();
    } else {
      double var = 0.0;
      for (double v : r) var += (v - mean_r) * (v - mean_r);
      var /= double(R - 1);
      e.stderr_ = corr * std::sqrt(var / double(R));
    }
    out.push_back(e);
  }
  return out;
}

std::vector<CovarianceEstimate> averaged_covariance(const std::vector<FieldRealization>& ensemble,
                                                    const std::vector<Point>& anchors,
                                                    const std::vector<double>& lags) {
  if (anchors.empty()) throw std::invalid_argument("averaged_covariance: no anchors");
  std::vector<CovarianceEstimate> acc = empirical_covariance(ensemble, anchors[0], lags);
  for (auto& e : acc) e.stderr_ *= e.stderr_;
  for (std::size_t a = 1; a < anchors.size(); ++a) {
    const auto est = empirical_covariance(ensemble, anchors[a], lags);
    for (std::size_t i = 0; i < est.size(); ++i) {
      acc[i].estimate += est[i].estimate;
      acc[i].stderr_ += est[i].stderr_ * est[i].stderr_;
    }
  }
  const double na = double(anchors.size());
  for (auto& e : acc) {
    e.estimate /= na;
    e.stderr_ = std::sqrt(e.stderr_) / na;
  }
  return acc;
}

double covariance_model(const Point& z, const Point& zp, const StrengthProfile& mu, double m,
                        double fitted_constant) {
  const double r = distance(z, zp);
  if (r == 0.0) throw SingularityError("covariance_model: z == z'");
  const int d = mu.dim();
  if (m == double(d)) return fitted_constant * mu.eval(z) * std::log(r);
  return fitted_constant * mu.eval(z) * std::pow(r, m - d);
}

double fit_covariance_constant(const std::vector<CovarianceEstimate>& est, const Point& anchor,
                               const StrengthProfile& mu, double m) {
  const int d = mu.dim();
  const double mv = mu.eval(anchor);
  double num = 0.0, den = 0.0;
  for (const auto& e : est) {
    const double basis = m == double(d) ? mv * std::log(e.lag) : mv * std::pow(e.lag, m - d);
    num += e.estimate * basis;
    den += basis * basis;
  }
  if (den == 0.0) throw std::invalid_argument("fit_covariance_constant: degenerate basis");
  return num / den;
}

}  // namespace bhscat

#pragma once

#include <optional>

#include "bhscat/util.hpp"

namespace bhscat {

/// C-infinity bump with an optional flat core: 1 for |x-c| <= core*radius,
/// smooth transition to 0 at |x-c| = radius.
struct Bump {
  Point center;
  double radius = 0.0;
  double amplitude = 0.0;
  double core = 0.0;  // fraction of radius that stays at the plateau value

  double eval(const Point& p) const;
};

/// Deterministic nonnegative correlation strength mu on its support D,
/// parameterized as a sum of compact bumps. Construction rejects bumps that
/// poke outside D so eval is smooth and vanishes outside the box. The
/// uniform() variant (mu = const on all of D) is the fixture the covariance
/// law tests call for.
class StrengthProfile {
 public:
  StrengthProfile(int dim, Box support, std::vector<Bump> bumps);
  static StrengthProfile uniform(int dim, Box support, double amplitude);

  double eval(const Point& p) const;
  int dim() const { return dim_; }
  const Box& support() const { return support_; }
  const std::vector<Bump>& bumps() const { return bumps_; }

 private:
  int dim_;
  Box support_;
  std::vector<Bump> bumps_;
  double uniform_amp_ = -1.0;  // >= 0 selects the uniform variant
};

/// Uniform periodic lattice; nodes are cell centers origin + (i + 1/2) h.
/// Flattening is x-fastest: flat = i + n[0] * (j + n[1] * k).
struct GridSpec {
  int dim = 2;
  Point origin;
  double h = 0.0;
  std::array<int, 3> n{1, 1, 1};

  std::size_t count() const {
    return std::size_t(n[0]) * n[1] * (dim == 3 ? n[2] : 1);
  }
  std::size_t flat(int i, int j, int k) const {
    return std::size_t(i) + std::size_t(n[0]) * (std::size_t(j) + std::size_t(n[1]) * k);
  }
  Point node(std::size_t f) const {
    const int i = int(f % n[0]);
    const int j = int((f / n[0]) % n[1]);
    const int k = int(f / (std::size_t(n[0]) * n[1]));
    return Point{origin.x + (i + 0.5) * h, origin.y + (j + 0.5) * h,
                 dim == 3 ? origin.z + (k + 0.5) * h : 0.0};
  }
  double length(int axis) const { return n[axis] * h; }
  Box box() const {
    Box b;
    b.dim = dim;
    b.lo = origin;
    b.hi = Point{origin.x + length(0), origin.y + length(1),
                 dim == 3 ? origin.z + length(2) : 0.0};
    return b;
  }
  bool same_lattice(const GridSpec& o) const;
};

/// One grid-sampled draw of the random potential rho = sqrt(mu) * Z.
struct FieldRealization {
  GridSpec grid;
  std::vector<double> values;
  double order_m = 0.0;
  std::uint64_t seed = 0;
  double ir_cutoff = 0.0;
};

/// Default IR cutoff: for m < d the zero mode's weight (1/L^d) delta^-m is set
/// equal to the continuum spectral mass of its Brillouin cell, which keeps the
/// lag-window power law unbiased across resolutions; for m = d (log branch,
/// genuinely IR-divergent) a quarter frequency cell pi/(2L).
double default_ir_cutoff(const GridSpec& grid, double m);

/// Stationary Gaussian layer Z: white noise filtered by
/// (delta^2 + |xi|^2)^(-m/4) on the discrete frequency lattice, normalized so
/// the lattice covariance approximates (2pi)^-d int (delta^2+|xi|^2)^(-m/2)
/// e^{i xi r} dxi independently of h. Real input noise keeps the spectrum
/// Hermitian, so the output is real up to roundoff; the leakage is checked and
/// discarded. ir_cutoff <= 0 selects default_ir_cutoff.
std::vector<double> synth_stationary(const GridSpec& grid, double m, double ir_cutoff,
                                     std::uint64_t seed, double* max_imag_leak = nullptr);

/// Draws rho = sqrt(mu) * Z. Requires m in (d-1, d] (domain error) and the grid
/// box to contain D with margin >= diam(D)/2 on every side (configuration
/// error, periodic-wraparound guard).
FieldRealization sample_field(const StrengthProfile& mu, double m, const GridSpec& grid,
                              std::uint64_t seed, double ir_cutoff = 0.0);

/// Grid sample of a deterministic function; used for smooth-potential tests
/// and as the rho carrier in pipelines that bypass randomness.
FieldRealization field_from_function(const GridSpec& grid,
                                     const std::function<double(const Point&)>& f);

/// count independent draws with per-realization seeds hash_seed(master, i),
/// generated in parallel.
std::vector<FieldRealization> make_ensemble(const StrengthProfile& mu, double m,
                                            const GridSpec& grid, std::uint64_t master_seed,
                                            int count, int threads);

struct CovarianceEstimate {
  double lag_requested = 0.0;
  double lag = 0.0;  // snapped to a whole number of grid cells
  double estimate = 0.0;
  double stderr_ = 0.0;  // NaN when flagged
  bool flagged = false;  // fewer than 3 realizations: spread undefined
};

/// Unbiased sample covariance of rho between the node nearest `anchor` and the
/// nodes at +-lag along each axis, averaged over directions. Requires >= 2
/// realizations sharing lattice and parameters.
std::vector<CovarianceEstimate> empirical_covariance(const std::vector<FieldRealization>& ensemble,
                                                     const Point& anchor,
                                                     const std::vector<double>& lags);

/// Mean of empirical_covariance over several anchors; the slope tests use
/// well-separated anchors to cut the sampling noise.
std::vector<CovarianceEstimate> averaged_covariance(const std::vector<FieldRealization>& ensemble,
                                                    const std::vector<Point>& anchors,
                                                    const std::vector<double>& lags);

/// Leading covariance model: c * mu(z) * ln|z-z'| when m == d, else
/// c * mu(z) * |z-z'|^{m-d}. Throws SingularityError at z = z'.
double covariance_model(const Point& z, const Point& zp, const StrengthProfile& mu, double m,
                        double fitted_constant);

/// Least-squares fit of the model constant against empirical estimates.
double fit_covariance_constant(const std::vector<CovarianceEstimate>& est, const Point& anchor,
                               const StrengthProfile& mu, double m);

}  // namespace bhscat

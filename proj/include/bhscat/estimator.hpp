#pragma once

#include <optional>

#include "bhscat/forward.hpp"

namespace bhscat {

/// Backscattered measurement u^s(x, k) at one receiver/wavenumber pair.
struct SweepRecord {
  Point x;
  double k = 0.0;
  Wavenumber wn;
  cplx us;
  int realization = 0;
  bool has_diagnostics = false;
  cplx u1, u2, born_residual;  // u^s - u1 - u2
};

struct SolverOptions {
  enum class Method { dense_lu, fast_iterative };
  Method method = Method::fast_iterative;
  double tol = 1e-12;
  int max_iter = 400;
  bool diagnostics = false;
};

/// Frequency band: uniform grid in kappa_r (ensemble mode) or uniform grid in
/// k (single-realization mode).
struct BandSpec {
  bool kappa_space = true;
  double lo = 1.0;
  double hi = 10.0;
  int per_decade = 64;  // kappa-space grids
  double dk = 0.5;      // k-space grids
};

std::vector<double> band_k_values(const BandSpec& band, double sigma);

struct SweepRequest {
  std::vector<Point> points;
  BandSpec band;
  double sigma = 0.0;
  SolverOptions solver;
  int threads = 1;
};

/// Solves the direct problem with source y = x for every (x, k, realization)
/// and records u^s. Work is parallel over wavenumbers (the kernel spectrum is
/// shared across realizations at fixed k); output order is fixed regardless of
/// scheduling. Solver errors are rethrown with (x, k, realization) context.
std::vector<SweepRecord> frequency_sweep(const std::vector<FieldRealization>& ensemble,
                                         const Box& domain, const SweepRequest& req);

struct StrengthData {
  enum class Mode { ensemble, single_realization };
  Mode mode = Mode::ensemble;
  std::vector<Point> points;
  std::vector<double> T_hat;
  std::vector<double> stderr_;
  std::vector<bool> flagged;  // T_hat < -3 stderr (cannot trigger here; kept for audit)
  double band_lo = 0.0, band_hi = 0.0;
  double m = 0.0;
  int d = 2;
  double sigma = 0.0;
};

/// Ensemble estimator of Eq-(1.3) type: trapezoid over the common kappa_r grid
/// of kappa_r^{m+14-2d} * mean |u^s|^2, divided by the band length. The
/// reduction is a deterministic pass over records sorted by (x, k,
/// realization).
StrengthData estimate_T_ensemble(std::vector<SweepRecord> records, double m, int d);

/// Single-realization estimator, lossless media only:
/// (1/(2K)) * trapezoid of k^{(m+13)/2-d} |u^s|^2 over the uniform k grid,
/// K = sqrt(k_max). Throws ModeError when sigma != 0 or multiple realizations
/// are present.
StrengthData estimate_T_single(std::vector<SweepRecord> records, double m, int d);

/// T_d(x) = 1/(8^4 pi^{4(d-2)}) int_D mu(z) / |x-z|^{2(d-1)} dz by high-
/// resolution midpoint quadrature. With a Wavenumber the damped variant is
/// returned: (kappa_r/|kappa|)^{2(7-d)} c_d int_D e^{-4 kappa_i |x-z|} mu(z) /
/// |x-z|^{2(d-1)} dz, the finite-k form the weighted E|u1|^2 converges to.
double reference_T(const StrengthProfile& mu, const Point& x, int d,
                   const Wavenumber* wn = nullptr, int quad_n = 0);

/// Batch variant reusing one distance pass per point.
std::vector<double> reference_T_curve(const StrengthProfile& mu, const Point& x, int d,
                                      const std::vector<Wavenumber>& wns, int quad_n = 0);

struct BornReport {
  std::vector<double> kappa;
  std::vector<double> u1_weighted;   // mean over (x, realization) of w(kappa) |u1|^2
  std::vector<double> u1_reference;  // mean over x of the damped reference
  std::vector<double> u1_ratio;      // elementwise quotient
  std::vector<double> u2_weighted;
  std::vector<double> b_weighted;
  double u1_ratio_top_decade = 0.0;
  double u2_top_over_bottom = 0.0;
  double b_top_over_bottom = 0.0;
};

/// Trend diagnostics for Born terms: (a) weighted ensemble |u1|^2 against the
/// damped reference, (b) weighted |u2|^2 band averages, (c) weighted
/// |born_residual|^2 band averages. Requires diagnostics on every record.
BornReport born_diagnostics(const std::vector<SweepRecord>& records, const StrengthProfile& mu,
                            double m, int d);

}  // namespace bhscat

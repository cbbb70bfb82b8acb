#include "bhscat/forward.hpp"

#include <cmath>
#include <unordered_map>

#include "bhscat/fft.hpp"

namespace bhscat {

ScatterGrid make_scatter_grid(const GridSpec& field_grid, const Box& domain) {
  ScatterGrid g;
  g.dim = field_grid.dim;
  g.h = field_grid.h;
  g.domain = domain;
  g.domain.dim = g.dim;

  const int n2 = g.dim == 3 ? field_grid.n[2] : 1;
  int ilo = field_grid.n[0], ihi = -1, jlo = field_grid.n[1], jhi = -1, klo = n2, khi = -1;
  for (int k = 0; k < n2; ++k)
    for (int j = 0; j < field_grid.n[1]; ++j)
      for (int i = 0; i < field_grid.n[0]; ++i) {
        const std::size_t f = field_grid.flat(i, j, k);
        if (!domain.contains(field_grid.node(f))) continue;
        ilo = std::min(ilo, i); ihi = std::max(ihi, i);
        jlo = std::min(jlo, j); jhi = std::max(jhi, j);
        klo = std::min(klo, k); khi = std::max(khi, k);
      }
  if (ihi < ilo) throw ConfigError("make_scatter_grid: no field nodes inside D");
  g.offset = {ilo, jlo, g.dim == 3 ? klo : 0};
  g.n = {ihi - ilo + 1, jhi - jlo + 1, g.dim == 3 ? khi - klo + 1 : 1};

  const double wgt = std::pow(g.h, g.dim);
  g.nodes.reserve(g.size());
  for (int k = 0; k < g.n[2]; ++k)
    for (int j = 0; j < g.n[1]; ++j)
      for (int i = 0; i < g.n[0]; ++i) {
        const std::size_t f = field_grid.flat(ilo + i, jlo + j, (g.dim == 3 ? klo : 0) + k);
        g.nodes.push_back(field_grid.node(f));
        g.weights.push_back(wgt);
        g.field_index.push_back(f);
      }
  return g;
}

std::vector<double> restrict_to_grid(const FieldRealization& rho, const ScatterGrid& grid) {
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = rho.values[grid.field_index[i]];
  return out;
}

namespace {

// Kernel values on the displacement lattice, memoized by squared integer
// radius (the kernel depends on |dz| only).
class KernelTable {
 public:
  KernelTable(const ScatterGrid& grid, const Wavenumber& wn)
      : grid_(grid), wn_(wn), diag_(phi_diagonal(wn, grid.dim)) {}

  cplx at(long long a, long long b, long long c) {
    const long long r2 = a * a + b * b + c * c;
    if (r2 == 0) return diag_;
    auto it = memo_.find(r2);
    if (it != memo_.end()) return it->second;
    const cplx v = phi_r(grid_.h * std::sqrt(double(r2)), wn_, grid_.dim);
    memo_.emplace(r2, v);
    return v;
  }

 private:
  const ScatterGrid& grid_;
  const Wavenumber& wn_;
  cplx diag_;
  std::unordered_map<long long, cplx> memo_;
};

void check_rho_grid(const FieldRealization& rho, const ScatterGrid& grid) {
  if (rho.grid.dim != grid.dim || rho.grid.h != grid.h)
    throw ConfigError("forward: rho lattice does not match the scatter grid");
  for (std::size_t f : grid.field_index)
    if (f >= rho.values.size())
      throw ConfigError("forward: scatter grid indexes outside the field lattice");
}

void check_exterior(const ScatterGrid& grid, const Point& p, const char* what) {
  if (grid.domain.dist(p) <= 0.0)
    throw std::domain_error(std::string("forward: ") + what +
                            " must be at positive distance from D");
}

}  // namespace

Eigen::MatrixXcd assemble_system(const FieldRealization& rho, const ScatterGrid& grid,
                                 const Wavenumber& wn) {
  check_rho_grid(rho, grid);
  const auto rv = restrict_to_grid(rho, grid);
  const Eigen::Index n = Eigen::Index(grid.size());
  KernelTable ker(grid, wn);

  Eigen::MatrixXcd A(n, n);
  const int n0 = grid.n[0], n1 = grid.n[1];
  auto decompose = [&](Eigen::Index f, int& i, int& j, int& k) {
    i = int(f % n0);
    j = int((f / n0) % n1);
    k = int(f / (std::size_t(n0) * n1));
  };
  for (Eigen::Index col = 0; col < n; ++col) {
    int ci, cj, ck;
    decompose(col, ci, cj, ck);
    const cplx rw = rv[col] * grid.weights[col];
    for (Eigen::Index row = 0; row < n; ++row) {
      int ri, rj, rk;
      decompose(row, ri, rj, rk);
      A(row, col) = -ker.at(ri - ci, rj - cj, rk - ck) * rw;
    }
    A(col, col) += 1.0;
  }
  return A;
}

Eigen::VectorXcd source_vector(const ScatterGrid& grid, const Point& y, const Wavenumber& wn) {
  Eigen::VectorXcd v(Eigen::Index(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i)
    v[Eigen::Index(i)] = phi(grid.nodes[i], y, wn, grid.dim);
  return v;
}

cplx receiver_eval(const ScatterGrid& grid, const Eigen::VectorXcd& phi_x,
                   const std::vector<double>& rho, const Eigen::VectorXcd& v) {
  cplx acc = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    acc += grid.weights[i] * phi_x[Eigen::Index(i)] * rho[i] * v[Eigen::Index(i)];
  return acc;
}

Eigen::VectorXcd solve_checked(const Eigen::MatrixXcd& A, const Eigen::VectorXcd& b,
                               double* rcond_out) {
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
  const double rc = lu.rcond();
  if (rcond_out) *rcond_out = rc;
  if (!(rc > 1e-14))
    throw ResonanceError("linear solve: condition estimate above 1e14 (rcond = " +
                         format_double(rc) + ")");
  return lu.solve(b);
}

FieldSolution solve_direct(const FieldRealization& rho, const ScatterGrid& grid, const Point& y,
                           const std::vector<Point>& receivers, const Wavenumber& wn) {
  check_rho_grid(rho, grid);
  check_exterior(grid, y, "source");
  for (const auto& x : receivers) check_exterior(grid, x, "receiver");

  const Eigen::MatrixXcd A = assemble_system(rho, grid, wn);
  const Eigen::VectorXcd b = source_vector(grid, y, wn);

  FieldSolution sol;
  sol.wn = wn;
  sol.source = y;
  sol.u_on_grid = solve_checked(A, b, &sol.rcond);

  const double bnorm = b.lpNorm<Eigen::Infinity>();
  sol.residual = (A * sol.u_on_grid - b).lpNorm<Eigen::Infinity>() / bnorm;
  if (!(sol.residual <= 1e-10))
    throw ResonanceError("solve_direct: Lippmann-Schwinger residual " +
                         format_double(sol.residual) + " above 1e-10");

  const auto rv = restrict_to_grid(rho, grid);
  sol.receivers.reserve(receivers.size());
  for (const auto& x : receivers) {
    const Eigen::VectorXcd phi_x = source_vector(grid, x, wn);
    ReceiverSample r;
    r.x = x;
    r.u0 = phi(x, y, wn, grid.dim);
    r.u = r.u0 + receiver_eval(grid, phi_x, rv, sol.u_on_grid);
    r.us = r.u - r.u0;
    sol.receivers.push_back(r);
  }
  return sol;
}

FastScatterOp::FastScatterOp(const ScatterGrid& grid, const Wavenumber& wn)
    : grid_(&grid), wn_(wn) {
  const int d = grid.dim;
  for (int a = 0; a < d; ++a) pad_[a] = 2 * grid.n[a];
  const std::size_t total = std::size_t(pad_[0]) * pad_[1] * pad_[2];
  kernel_hat_.assign(total, cplx(0, 0));
  work_.assign(total, cplx(0, 0));

  KernelTable ker(grid, wn);
  const double wgt = std::pow(grid.h, d);
  const int p0 = pad_[0], p1 = pad_[1], p2 = pad_[2];
  auto wrap = [](int p, int P) { return p <= P / 2 ? p : p - P; };
  std::size_t idx = 0;
  for (int k = 0; k < p2; ++k) {
    const int dk = d == 3 ? wrap(k, p2) : 0;
    for (int j = 0; j < p1; ++j) {
      const int dj = wrap(j, p1);
      for (int i = 0; i < p0; ++i, ++idx) {
        const int di = wrap(i, p0);
        kernel_hat_[idx] = wgt * ker.at(di, dj, dk);
      }
    }
  }
  fftutil::dft(kernel_hat_.data(), pad_, d, -1);
}

void FastScatterOp::apply(const std::vector<double>& rho, const Eigen::VectorXcd& x,
                          Eigen::VectorXcd& y) const {
  const ScatterGrid& g = *grid_;
  const int d = g.dim;
  const std::size_t total = kernel_hat_.size();
  std::fill(work_.begin(), work_.end(), cplx(0, 0));

  // Scatter charges rho_j x_j into the padded lattice.
  const int n0 = g.n[0], n1 = g.n[1], n2 = g.n[2];
  const std::size_t p0 = pad_[0], p1 = pad_[1];
  std::size_t src = 0;
  for (int k = 0; k < n2; ++k)
    for (int j = 0; j < n1; ++j) {
      const std::size_t row = p0 * (std::size_t(j) + p1 * std::size_t(k));
      for (int i = 0; i < n0; ++i, ++src)
        work_[row + i] = rho[src] * x[Eigen::Index(src)];
    }

  fftutil::dft(work_.data(), pad_, d, -1);
  for (std::size_t i = 0; i < total; ++i) work_[i] *= kernel_hat_[i];
  fftutil::dft(work_.data(), pad_, d, +1);

  const double scale = 1.0 / double(total);
  y.resize(Eigen::Index(g.size()));
  std::size_t dst = 0;
  for (int k = 0; k < n2; ++k)
    for (int j = 0; j < n1; ++j) {
      const std::size_t row = p0 * (std::size_t(j) + p1 * std::size_t(k));
      for (int i = 0; i < n0; ++i, ++dst)
        y[Eigen::Index(dst)] = work_[row + i] * scale;
    }
}

IterativeResult solve_iterative(const FastScatterOp& op, const std::vector<double>& rho,
                                const Eigen::VectorXcd& rhs, double tol_inf, int max_iter) {
  const Eigen::Index n = rhs.size();
  auto apply_A = [&](const Eigen::VectorXcd& v, Eigen::VectorXcd& out) {
    op.apply(rho, v, out);
    out = v - out;  // (I - K) v
  };

  // Preconditioner-free BiCGSTAB (van der Vorst); A is a compact perturbation
  // of the identity here, so plain BiCGSTAB converges in a handful of sweeps.
  Eigen::VectorXcd x = rhs;  // u ~ u0 seed
  Eigen::VectorXcd r(n), r0(n), p(n), v(n), s(n), t(n), tmp(n);
  apply_A(x, tmp);
  r = rhs - tmp;
  r0 = r;
  const double rhs2 = rhs.norm();
  double rnorm = r.norm();
  cplx rho_old = 1.0, alpha = 1.0, omega = 1.0;
  p.setZero();
  v.setZero();

  const double tol2 = 1e-13;
  int it = 0;
  for (; it < max_iter && rnorm > tol2 * rhs2; ++it) {
    const cplx rho_new = r0.dot(r);
    if (std::abs(rho_new) < 1e-300) break;  // breakdown; fall through to check
    const cplx beta = (rho_new / rho_old) * (alpha / omega);
    p = r + beta * (p - omega * v);
    apply_A(p, v);
    alpha = rho_new / r0.dot(v);
    s = r - alpha * v;
    if (s.norm() <= tol2 * rhs2) {
      x += alpha * p;
      r = s;
      rnorm = r.norm();
      ++it;
      break;
    }
    apply_A(s, t);
    omega = t.dot(s) / t.dot(t);
    x += alpha * p + omega * s;
    r = s - omega * t;
    rho_old = rho_new;
    rnorm = r.norm();
  }

  IterativeResult res;
  res.iterations = it;
  apply_A(x, tmp);
  res.residual = (tmp - rhs).lpNorm<Eigen::Infinity>() / rhs.lpNorm<Eigen::Infinity>();
  res.u = std::move(x);
  if (!(res.residual <= std::max(tol_inf, 1e-10)))
    throw ResonanceError("solve_iterative: residual " + format_double(res.residual) +
                         " after " + std::to_string(it) + " iterations");
  return res;
}

cplx born_term(int n, const FieldRealization& rho, const ScatterGrid& grid, const Point& x,
               const Point& y, const Wavenumber& wn) {
  if (n < 0) throw std::domain_error("born_term: order must be >= 0");
  check_rho_grid(rho, grid);
  check_exterior(grid, y, "source");
  check_exterior(grid, x, "receiver");
  if (n == 0) return phi(x, y, wn, grid.dim);

  const auto rv = restrict_to_grid(rho, grid);
  FastScatterOp op(grid, wn);
  Eigen::VectorXcd v = source_vector(grid, y, wn), w;
  for (int i = 1; i < n; ++i) {
    op.apply(rv, v, w);
    v.swap(w);
  }
  const Eigen::VectorXcd phi_x = source_vector(grid, x, wn);
  return receiver_eval(grid, phi_x, rv, v);
}

cplx born_partial_sum(int terms_n, const FieldRealization& rho, const ScatterGrid& grid,
                      const Point& x, const Point& y, const Wavenumber& wn) {
  if (terms_n < 0) throw std::domain_error("born_partial_sum: order must be >= 0");
  check_rho_grid(rho, grid);
  cplx acc = phi(x, y, wn, grid.dim);
  if (terms_n == 0) return acc;

  const auto rv = restrict_to_grid(rho, grid);
  FastScatterOp op(grid, wn);
  const Eigen::VectorXcd phi_x = source_vector(grid, x, wn);
  Eigen::VectorXcd v = source_vector(grid, y, wn), w;
  for (int n = 1; n <= terms_n; ++n) {
    acc += receiver_eval(grid, phi_x, rv, v);
    if (n < terms_n) {
      op.apply(rv, v, w);
      v.swap(w);
    }
  }
  return acc;
}

double contraction_ratio(const FieldRealization& rho, const ScatterGrid& grid, const Point& y,
                         const Wavenumber& wn) {
  const auto rv = restrict_to_grid(rho, grid);
  FastScatterOp op(grid, wn);
  Eigen::VectorXcd u0 = source_vector(grid, y, wn), u1, u2;
  op.apply(rv, u0, u1);
  op.apply(rv, u1, u2);
  const double n1 = u1.lpNorm<Eigen::Infinity>();
  if (n1 == 0.0) return 0.0;
  return u2.lpNorm<Eigen::Infinity>() / n1;
}

double locate_k0(const FieldRealization& rho, const ScatterGrid& grid, const Point& y,
                 double sigma, double k_lo, double k_hi) {
  auto ratio = [&](double k) {
    return contraction_ratio(rho, grid, y, complex_wavenumber(k, sigma));
  };
  if (ratio(k_lo) < 1.0) return k_lo;
  if (ratio(k_hi) >= 1.0)
    throw ConfigError("locate_k0: contraction ratio >= 1 across the whole bracket");
  double lo = std::log(k_lo), hi = std::log(k_hi);
  for (int i = 0; i < 40; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (ratio(std::exp(mid)) < 1.0)
      hi = mid;
    else
      lo = mid;
  }
  return std::exp(hi);
}

}  // namespace bhscat

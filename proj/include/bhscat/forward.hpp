#pragma once

#include <Eigen/Dense>

#include "bhscat/greens.hpp"
#include "bhscat/randfield.hpp"
#include "bhscat/util.hpp"
#include "bhscat/wavenumber.hpp"

namespace bhscat {

/// Midpoint-rule quadrature over D: the field-lattice cells whose centers lie
/// in D, each with weight h^d. Keeps the sub-lattice structure so kernels can
/// be applied by circular convolution.
struct ScatterGrid {
  int dim = 2;
  double h = 0.0;
  Box domain;                           // D
  std::array<int, 3> n{1, 1, 1};        // sub-lattice extents
  std::array<int, 3> offset{0, 0, 0};   // into the field lattice
  std::vector<Point> nodes;
  std::vector<double> weights;
  std::vector<std::size_t> field_index;

  std::size_t size() const { return nodes.size(); }
};

ScatterGrid make_scatter_grid(const GridSpec& field_grid, const Box& domain);

/// rho restricted to the scatter grid nodes.
std::vector<double> restrict_to_grid(const FieldRealization& rho, const ScatterGrid& grid);

/// Dense (I - K) with K[i][j] = w_j Phi(z_i, z_j) rho_j; the diagonal kernel
/// value is the analytic phi_diagonal.
Eigen::MatrixXcd assemble_system(const FieldRealization& rho, const ScatterGrid& grid,
                                 const Wavenumber& wn);

struct ReceiverSample {
  Point x;
  cplx u, u0, us;
};

struct FieldSolution {
  Wavenumber wn;
  Point source;
  Eigen::VectorXcd u_on_grid;
  std::vector<ReceiverSample> receivers;
  double residual = 0.0;  // ||u - K u - Phi(.,y)||_inf / ||Phi(.,y)||_inf
  double rcond = 0.0;
};

/// Dense LU solve of the Lippmann-Schwinger system for a point source at y,
/// then receiver evaluation. Throws ResonanceError when the LU condition
/// estimate exceeds 1e14 or the residual check fails.
FieldSolution solve_direct(const FieldRealization& rho, const ScatterGrid& grid, const Point& y,
                           const std::vector<Point>& receivers, const Wavenumber& wn);

/// LU with the condition guard used by solve_direct: rcond below 1e-14 is a
/// resonance error (the continuous problem is uniquely solvable; numerical
/// singularity signals discretization trouble).
Eigen::VectorXcd solve_checked(const Eigen::MatrixXcd& A, const Eigen::VectorXcd& b,
                               double* rcond_out = nullptr);

/// n-th Born term u_n(x, y, k): n applications of the discrete K to
/// Phi(., y), evaluated at x. n = 0 returns Phi(x, y).
cplx born_term(int n, const FieldRealization& rho, const ScatterGrid& grid, const Point& x,
               const Point& y, const Wavenumber& wn);

/// Partial sum of Born terms through order N.
cplx born_partial_sum(int terms_n, const FieldRealization& rho, const ScatterGrid& grid,
                      const Point& x, const Point& y, const Wavenumber& wn);

/// Applies K = Phi * diag(rho * w) through the block-Toeplitz structure of the
/// uniform sub-lattice: one circular convolution on the 2n-padded lattice per
/// application. One instance per wavenumber; the kernel spectrum is
/// rho-independent so instances are shared across realizations at fixed k.
/// apply() uses internal buffers and is not thread-safe; use one instance per
/// worker.
class FastScatterOp {
 public:
  FastScatterOp(const ScatterGrid& grid, const Wavenumber& wn);

  // y = K x (x, y over the scatter grid nodes).
  void apply(const std::vector<double>& rho, const Eigen::VectorXcd& x,
             Eigen::VectorXcd& y) const;

  const ScatterGrid& grid() const { return *grid_; }
  const Wavenumber& wn() const { return wn_; }

 private:
  const ScatterGrid* grid_;
  Wavenumber wn_;
  std::array<int, 3> pad_{1, 1, 1};
  std::vector<cplx> kernel_hat_;
  mutable std::vector<cplx> work_;
};

/// Phi(z_j, y) over the grid nodes.
Eigen::VectorXcd source_vector(const ScatterGrid& grid, const Point& y, const Wavenumber& wn);

/// sum_j w_j Phi(x, z_j) rho_j v_j given the precomputed Phi(x, z_j) column.
cplx receiver_eval(const ScatterGrid& grid, const Eigen::VectorXcd& phi_x,
                   const std::vector<double>& rho, const Eigen::VectorXcd& v);

struct IterativeResult {
  Eigen::VectorXcd u;
  double residual = 0.0;  // inf-norm relative defect
  int iterations = 0;
};

/// Matrix-free BiCGSTAB on (I - K) u = rhs. Deterministic (fixed reduction
/// order); verifies the inf-norm residual against tol_inf after convergence
/// and throws ResonanceError if the verification fails or the iteration
/// stalls.
IterativeResult solve_iterative(const FastScatterOp& op, const std::vector<double>& rho,
                                const Eigen::VectorXcd& rhs, double tol_inf = 1e-12,
                                int max_iter = 400);

/// Contraction proxy ||K u1||_inf / ||u1||_inf with u1 = K Phi(., y): the
/// measured Born ratio used to locate k0.
double contraction_ratio(const FieldRealization& rho, const ScatterGrid& grid, const Point& y,
                         const Wavenumber& wn);

/// Smallest k with contraction ratio < 1, located by bisection on log k.
double locate_k0(const FieldRealization& rho, const ScatterGrid& grid, const Point& y,
                 double sigma, double k_lo = 1e-3, double k_hi = 1e6);

}  // namespace bhscat

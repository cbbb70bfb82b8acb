#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "bhscat/randfield.hpp"
#include "bhscat/util.hpp"

namespace bhscat {

/// Discretization of T_d(x) = c_d int_D mu(z) / |x-z|^{2(d-1)} dz:
/// A[i][j] = c_d w_j / |x_i - z_j|^{2(d-1)} with c_d = 1/(8^4 pi^{4(d-2)}).
struct ForwardMap {
  Eigen::MatrixXd A;
  std::vector<Point> row_points;
  std::vector<Point> col_points;
  std::vector<double> col_weights;
  std::array<int, 3> grid_n{1, 1, 1};
  int dim = 2;
};

/// Reconstruction lattice over D: n nodes per side, cell centers, weight h^d.
GridSpec make_recon_grid(const Box& domain, int n, int dim);

ForwardMap assemble_forward_map(const std::vector<Point>& points, const GridSpec& recon,
                                int dim);

struct StrengthEstimate {
  Eigen::VectorXd mu_hat;
  double lambda = 0.0;
  double data_residual = 0.0;  // ||A mu - T||_2
  double smoothness = 0.0;     // ||L mu||_2
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct IterationLimitError : std::runtime_error {
  explicit IterationLimitError(std::string what, StrengthEstimate est)
      : std::runtime_error(std::move(what)), last(std::move(est)) {}
  StrengthEstimate last;
};

/// Minimizes ||A mu - T||^2 + lambda ||L mu||^2 subject to mu >= 0, L the
/// discrete gradient on the reconstruction lattice. Projected gradient with
/// backtracking; the objective is non-increasing every iteration. Converged
/// when the relative objective decrease drops below rel_tol; throws
/// IterationLimitError (carrying the last iterate) at the iteration cap.
StrengthEstimate recover_strength(const ForwardMap& fmap, const Eigen::VectorXd& T_hat,
                                  double lambda, const Eigen::VectorXd* init = nullptr,
                                  double rel_tol = 1e-10, int max_iter = 100000);

std::vector<double> default_lambda_grid();

/// Discrepancy principle: smallest lambda on the grid with
/// ||A mu_hat(lambda) - T_hat|| >= noise_estimate; the largest grid value when
/// even that residual stays below the noise level. Throws on an empty grid.
double pick_lambda(const ForwardMap& fmap, const Eigen::VectorXd& T_hat, double noise_estimate,
                   const std::vector<double>& grid = default_lambda_grid());

}  // namespace bhscat

#pragma once

#include "bhscat/specfun.hpp"
#include "bhscat/util.hpp"
#include "bhscat/wavenumber.hpp"

namespace bhscat {

/// Fundamental solution of Delta^2 - kappa^4 as a function of r = |x - y|.
/// Continuous at r = 0 (delegates to phi_diagonal there).
cplx phi_r(double r, const Wavenumber& wn, int dim);

inline cplx phi(const Point& x, const Point& y, const Wavenumber& wn, int dim) {
  return phi_r(distance(x, y), wn, dim);
}

/// Diagonal limit: -i/(8 kappa^2) in 2D, -(1+i)/(8 pi kappa) in 3D. Hard-coded
/// from the analytic limits; the 2D formula evaluated at tiny r loses the value
/// to log cancellation.
cplx phi_diagonal(const Wavenumber& wn, int dim);

/// Coefficient C_j of the 2D large-argument expansion
///   phi = -sum_j C_j / (8 kappa^2 (kappa r)^{j+1/2}) (i e^{i kappa r} - i^{1/2-j} e^{-kappa r}).
/// C_j = sqrt(2/pi) e^{-i pi/4} i^{-j} 8^{-j}/j! prod_{l=1..j} (2l-1)^2, matching
/// the Hankel/Macdonald tails term by term (|C_0| = sqrt(2/pi)).
cplx asym_coeff(int j);

/// Partial sum of that expansion through j = N (2D only). Diverges factorially
/// in N at fixed kappa*r; callers pick N well below the optimal truncation
/// index ~ 2|kappa|r. Throws SingularityError at r = 0.
cplx phi_truncated(double r, const Wavenumber& wn, int terms_n);

inline cplx phi_truncated(const Point& x, const Point& y, const Wavenumber& wn, int terms_n) {
  return phi_truncated(distance(x, y), wn, terms_n);
}

}  // namespace bhscat

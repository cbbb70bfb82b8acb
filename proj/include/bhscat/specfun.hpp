#pragma once

#include "bhscat/util.hpp"

namespace bhscat {

/// Switch point and term caps for the series/asymptotic evaluation. The
/// defaults were calibrated against the extended-precision oracle in the test
/// suite and frozen: at |z| = 10.5 the 22-term asymptotic expansion sits at
/// its optimal-truncation floor (~1.3e-10 over the whole supported sector)
/// and the long-double ascending series keeps its worst cancellation loss
/// near 1.5e-10, so both branches agree to well under 1e-9 at the seam.
struct SpecFunConfig {
  double crossover_radius = 10.5;
  int series_terms = 40;
  int asym_terms = 22;
};

/// Hankel function of the first kind, nu in {0, 1}. Supported sector:
/// everything except the open lower-left quadrant (Re z < 0 and Im z < 0),
/// which covers both kappa*r arguments (upper-right) and the rotated
/// arguments i*kappa*r used through the Macdonald relation.
/// Throws SingularityError at z = 0 and std::domain_error outside the sector.
cplx hankel1(int nu, cplx z, const SpecFunConfig& cfg = {});

/// Macdonald function K_nu for nu in {0, 1}, Re z > 0, evaluated through
/// K_nu(z) = (pi/2) i^{nu+1} H_nu^{(1)}(i z).
cplx macdonald(int nu, cplx z, const SpecFunConfig& cfg = {});

}  // namespace bhscat

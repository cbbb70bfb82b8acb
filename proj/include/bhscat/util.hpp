#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace bhscat {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

/// Point in R^d (d = 2 or 3; unused coordinates stay zero).
struct Point {
  double x = 0.0, y = 0.0, z = 0.0;
};

inline double distance(const Point& a, const Point& b) {
  const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

/// Axis-aligned box, the support region D and friends.
struct Box {
  Point lo, hi;
  int dim = 2;

  bool contains(const Point& p) const {
    bool in = p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y;
    if (dim == 3) in = in && p.z >= lo.z && p.z <= hi.z;
    return in;
  }
  double diameter() const {
    const double dx = hi.x - lo.x, dy = hi.y - lo.y;
    const double dz = dim == 3 ? hi.z - lo.z : 0.0;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
  }
  double volume() const {
    double v = (hi.x - lo.x) * (hi.y - lo.y);
    if (dim == 3) v *= (hi.z - lo.z);
    return v;
  }
  /// Distance from a point to the box (0 if inside).
  double dist(const Point& p) const {
    auto clamp1 = [](double v, double a, double b) { return v < a ? a : (v > b ? b : v); };
    Point q{clamp1(p.x, lo.x, hi.x), clamp1(p.y, lo.y, hi.y),
            dim == 3 ? clamp1(p.z, lo.z, hi.z) : 0.0};
    Point pp = p;
    if (dim == 2) pp.z = 0.0;
    return distance(pp, q);
  }
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SingularityError : std::domain_error {
  using std::domain_error::domain_error;
};
struct ModeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ResonanceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// splitmix64; used to derive independent per-realization seeds from a master seed.
inline std::uint64_t hash_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t x = master + 0x9E3779B97F4A7C15ull * (index + 1);
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ull;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBull;
  x ^= x >> 31;
  return x;
}

/// Deterministic normal/uniform stream. mt19937_64 is bit-identical across
/// platforms and the Box-Muller transform is spelled out here so draws do not
/// depend on the standard library's distribution implementation.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : state_(seed) {}

  double uniform() {  // in (0, 1]
    return static_cast<double>((state_() >> 11) + 1) * 0x1.0p-53;
  }
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * pi * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * pi * u2);
  }

 private:
  std::mt19937_64 state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Work items are
/// claimed through an atomic counter; callers write results into
/// preallocated slots so output does not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, int threads);

int default_thread_count();

/// Shortest-round-trip decimal formatting (17 significant digits, '.' decimal
/// separator regardless of locale).
std::string format_double(double v);

std::uint64_t fnv1a(const void* data, std::size_t n);
std::uint64_t fnv1a_file(const std::string& path);

inline std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return v;
}

/// Least-squares line fit y = slope*x + intercept; returns {slope, intercept, r2}.
struct LineFit {
  double slope = 0.0, intercept = 0.0, r2 = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace bhscat

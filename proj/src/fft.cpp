#include "bhscat/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace bhscat::fftutil {

namespace {

std::mutex planner_mutex;

struct PlanKey {
  std::array<int, 3> dims;
  int rank;
  int sign;
  bool operator<(const PlanKey& o) const {
    if (dims != o.dims) return dims < o.dims;
    if (rank != o.rank) return rank < o.rank;
    return sign < o.sign;
  }
};

fftw_plan plan_for(const PlanKey& key) {
  static std::map<PlanKey, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(planner_mutex);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  std::size_t total = 1;
  // FFTW is row-major (last dim fastest); our layout is x-fastest.
  int fdims[3];
  for (int a = 0; a < key.rank; ++a) {
    fdims[a] = key.dims[key.rank - 1 - a];
    total *= key.dims[a];
  }
  std::vector<cplx> scratch(total);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  fftw_plan p = fftw_plan_dft(key.rank, fdims, buf, buf,
                              key.sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                              FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!p) throw std::runtime_error("fftw planning failed");
  cache.emplace(key, p);
  return p;
}

}  // namespace

void dft(cplx* data, const std::array<int, 3>& dims, int rank, int sign) {
  fftw_plan p = plan_for(PlanKey{dims, rank, sign});
  auto* buf = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(p, buf, buf);
}

}  // namespace bhscat::fftutil

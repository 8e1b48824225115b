#include "fft_plans.hpp"

#include <map>
#include <mutex>
#include <utility>
#include <vector>

namespace cgle::detail {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// Plans live for the whole process; std::map keeps references stable.
std::map<std::pair<int, int>, FftPair>& cache() {
  static std::map<std::pair<int, int>, FftPair> c;
  return c;
}

const FftPair& lookup(int rows, int cols) {
  std::lock_guard<std::mutex> lock(planner_mutex());
  auto& c = cache();
  auto it = c.find({rows, cols});
  if (it != c.end()) return it->second;

  const std::size_t n = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  std::vector<std::complex<double>> in(n), out(n);
  auto* pin = reinterpret_cast<fftw_complex*>(in.data());
  auto* pout = reinterpret_cast<fftw_complex*>(out.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  FftPair p;
  if (rows == 0) {
    p.forward = fftw_plan_dft_1d(cols, pin, pout, FFTW_FORWARD, flags);
    p.backward = fftw_plan_dft_1d(cols, pin, pout, FFTW_BACKWARD, flags);
  } else {
    p.forward = fftw_plan_dft_2d(rows, cols, pin, pout, FFTW_FORWARD, flags);
    p.backward = fftw_plan_dft_2d(rows, cols, pin, pout, FFTW_BACKWARD, flags);
  }
  return c.emplace(std::make_pair(rows, cols), p).first->second;
}

}  // namespace

const FftPair& plans_2d(int pt, int px) { return lookup(pt, px); }

const FftPair& plans_1d(int n) { return lookup(0, n); }

}  // namespace cgle::detail

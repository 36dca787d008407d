#include "holoq/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

namespace holoq::detail {
namespace {

// FFTW plan creation is not thread-safe; new-array execution is. Plans are made
// with FFTW_UNALIGNED so they can run on any caller buffer.
std::mutex plan_mutex;
std::map<std::tuple<int, int, int>, fftw_plan> plan_cache;

fftw_plan get_plan(int n0, int n1, int sign) {
  std::lock_guard<std::mutex> lock(plan_mutex);
  const auto key = std::make_tuple(n0, n1, sign);
  auto it = plan_cache.find(key);
  if (it != plan_cache.end()) return it->second;

  std::vector<std::complex<double>> scratch(static_cast<std::size_t>(n0) * n1);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  fftw_plan p;
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  if (n1 == 1) {
    p = fftw_plan_dft_1d(n0, buf, buf, sign, flags);
  } else {
    p = fftw_plan_dft_2d(n0, n1, buf, buf, sign, flags);
  }
  plan_cache.emplace(key, p);
  return p;
}

std::map<std::tuple<int, int, int>, fftw_plan> axis_plan_cache;

fftw_plan get_axis_plan(int n, int axis, int sign) {
  std::lock_guard<std::mutex> lock(plan_mutex);
  const auto key = std::make_tuple(n, axis, sign);
  auto it = axis_plan_cache.find(key);
  if (it != axis_plan_cache.end()) return it->second;

  std::vector<std::complex<double>> scratch(static_cast<std::size_t>(n) * n);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  // axis 0 is contiguous (stride 1, consecutive rows n apart); axis 1 strides
  // by n with consecutive columns adjacent.
  const int stride = axis == 0 ? 1 : n;
  const int dist = axis == 0 ? n : 1;
  fftw_plan p = fftw_plan_many_dft(1, &n, n, buf, nullptr, stride, dist, buf,
                                   nullptr, stride, dist, sign, flags);
  axis_plan_cache.emplace(key, p);
  return p;
}

}  // namespace

void fft_inplace(std::complex<double>* data, int n0, int n1, int sign) {
  fftw_plan p = get_plan(n0, n1, sign);
  auto* buf = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(p, buf, buf);
}

void fft_axis_inplace(std::complex<double>* data, int n, int axis, int sign) {
  fftw_plan p = get_axis_plan(n, axis, sign);
  auto* buf = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(p, buf, buf);
}

}  // namespace holoq::detail

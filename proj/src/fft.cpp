#include "weldfcs/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

namespace weldfcs {

namespace {
std::mutex g_plan_mutex;

fftw_plan get_plan(int n, int sign) {
  static std::map<std::pair<int, int>, fftw_plan> plans;
  std::lock_guard<std::mutex> lock(g_plan_mutex);
  auto it = plans.find({n, sign});
  if (it != plans.end()) return it->second;
  std::vector<cplx> a(n), b(n);
  fftw_plan p = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(a.data()),
                                 reinterpret_cast<fftw_complex*>(b.data()),
                                 sign > 0 ? FFTW_BACKWARD : FFTW_FORWARD,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
  plans.emplace(std::make_pair(n, sign), p);
  return p;
}
}  // namespace

void dft(const cplx* in, cplx* out, int n, int sign) {
  fftw_plan p = get_plan(n, sign);
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

}  // namespace weldfcs

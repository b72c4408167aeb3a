#pragma once

#include <complex>
#include <vector>

namespace weldfcs {

using cplx = std::complex<double>;

// out[k] = sum_j in[j] exp(sign * 2 pi i j k / n), sign = +1 or -1.
// Plans are cached per (n, sign) and built with FFTW_ESTIMATE so that results
// do not depend on planner timing.
void dft(const cplx* in, cplx* out, int n, int sign);

inline std::vector<cplx> dft(const std::vector<cplx>& in, int sign) {
  std::vector<cplx> out(in.size());
  dft(in.data(), out.data(), static_cast<int>(in.size()), sign);
  return out;
}

}  // namespace weldfcs

#include "hypertri/fft.hpp"

#include <fftw3.h>

#include <map>

namespace hypertri::fft {

namespace {

// FFTW plans are created lazily per transform size and owned per thread; the
// planner itself is not re-entrant.
struct PlanCache {
  struct Plans {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
  };
  std::map<int, Plans> plans;

  ~PlanCache() {
    for (auto& [n, p] : plans) {
      fftw_destroy_plan(p.fwd);
      fftw_destroy_plan(p.bwd);
    }
  }

  const Plans& get(int n) {
    auto it = plans.find(n);
    if (it != plans.end())
      return it->second;
    Eigen::VectorXcd a(n), b(n);
    auto* in = reinterpret_cast<fftw_complex*>(a.data());
    auto* out = reinterpret_cast<fftw_complex*>(b.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    Plans p{fftw_plan_dft_1d(n, in, out, FFTW_FORWARD, flags), fftw_plan_dft_1d(n, in, out, FFTW_BACKWARD, flags)};
    return plans.emplace(n, p).first->second;
  }
};

PlanCache& cache() {
  thread_local PlanCache c;
  return c;
}

Eigen::VectorXcd run(const Eigen::VectorXcd& in, bool forward_dir) {
  const int n = static_cast<int>(in.size());
  Eigen::VectorXcd out(n);
  if (n == 0)
    return out;
  const auto& p = cache().get(n);
  // Out-of-place complex transforms leave the input untouched.
  auto* src = reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in.data()));
  fftw_execute_dft(forward_dir ? p.fwd : p.bwd, src, reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

} // namespace

Eigen::VectorXcd forward(const Eigen::VectorXcd& u) { return run(u, true); }

Eigen::VectorXcd inverse(const Eigen::VectorXcd& uhat) {
  Eigen::VectorXcd out = run(uhat, false);
  out /= static_cast<double>(uhat.size());
  return out;
}

} // namespace hypertri::fft

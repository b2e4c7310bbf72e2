#include "fft_backend.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

namespace fracscape::detail {
namespace {

enum class Kind { kForward, kBackward, kR2C, kC2R };

fftw_plan make_plan(const GridSpec& g, Kind kind) {
  const int n = static_cast<int>(g.n());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  std::vector<Complex> cbuf(g.size());
  std::vector<double> rbuf(g.size());
  auto* c = reinterpret_cast<fftw_complex*>(cbuf.data());
  std::vector<Complex> cbuf2(g.size());
  auto* c2 = reinterpret_cast<fftw_complex*>(cbuf2.data());
  switch (kind) {
    case Kind::kForward:
      return g.dim() == 1 ? fftw_plan_dft_1d(n, c, c2, FFTW_FORWARD, flags)
                          : fftw_plan_dft_2d(n, n, c, c2, FFTW_FORWARD, flags);
    case Kind::kBackward:
      return g.dim() == 1 ? fftw_plan_dft_1d(n, c, c2, FFTW_BACKWARD, flags)
                          : fftw_plan_dft_2d(n, n, c, c2, FFTW_BACKWARD, flags);
    case Kind::kR2C:
      return g.dim() == 1 ? fftw_plan_dft_r2c_1d(n, rbuf.data(), c, flags)
                          : fftw_plan_dft_r2c_2d(n, n, rbuf.data(), c, flags);
    case Kind::kC2R:
      return g.dim() == 1 ? fftw_plan_dft_c2r_1d(n, c, rbuf.data(), flags)
                          : fftw_plan_dft_c2r_2d(n, n, c, rbuf.data(), flags);
  }
  return nullptr;
}

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(const GridSpec& g, Kind kind) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_tuple(g.dim(), g.n(), kind);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    fftw_plan plan = make_plan(g, kind);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, std::size_t, Kind>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }
// FFTW never writes to the input of an out-of-place c2c transform.
fftw_complex* as_fftw(const Complex* p) { return reinterpret_cast<fftw_complex*>(const_cast<Complex*>(p)); }

}  // namespace

FftBackend::FftBackend(const GridSpec& grid)
    : c2c_fwd_(cache().get(grid, Kind::kForward)),
      c2c_bwd_(cache().get(grid, Kind::kBackward)),
      r2c_(cache().get(grid, Kind::kR2C)),
      c2r_(cache().get(grid, Kind::kC2R)) {}

void FftBackend::forward(const Complex* in, Complex* out) const {
  fftw_execute_dft(static_cast<fftw_plan>(c2c_fwd_), as_fftw(in), as_fftw(out));
}

void FftBackend::backward(const Complex* in, Complex* out) const {
  fftw_execute_dft(static_cast<fftw_plan>(c2c_bwd_), as_fftw(in), as_fftw(out));
}

void FftBackend::forward_real(const double* in, Complex* out) const {
  // r2c leaves its input untouched.
  fftw_execute_dft_r2c(static_cast<fftw_plan>(r2c_), const_cast<double*>(in), as_fftw(out));
}

void FftBackend::backward_real(Complex* in, double* out) const {
  fftw_execute_dft_c2r(static_cast<fftw_plan>(c2r_), as_fftw(in), out);
}

}  // namespace fracscape::detail

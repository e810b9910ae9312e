#include "coreks/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>

namespace coreks {
namespace {

// FFTW planning is not thread safe; execution on distinct arrays is. Plans are
// created once per (ny, nx, sign) with FFTW_UNALIGNED so they can run on any
// caller-provided buffers via fftw_execute_dft.
class PlanCache {
 public:
  fftw_plan get(int ny, int nx, int sign) {
    std::lock_guard<std::mutex> lock(mu_);
    auto key = std::make_tuple(ny, nx, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::vector<cplx> a(static_cast<size_t>(nx) * ny), b(a.size());
    fftw_plan p = fftw_plan_dft_2d(ny, nx, reinterpret_cast<fftw_complex*>(a.data()),
                                   reinterpret_cast<fftw_complex*>(b.data()), sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, p);
    return p;
  }

 private:
  std::mutex mu_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

}  // namespace

void fft2_centered(ComplexGrid& g, bool inverse) {
  const int nx = g.dims().nx, ny = g.dims().ny, nt = g.dims().nt;
  const size_t npix = static_cast<size_t>(nx) * ny;
  const double s = 1.0 / std::sqrt(static_cast<double>(npix));
  // ifftshift rotates by ceil(n/2), fftshift by floor(n/2); both folded into
  // the copies around the transform.
  const int px = (nx + 1) / 2, py = (ny + 1) / 2;
  const int qx = nx / 2, qy = ny / 2;

  fftw_plan plan = cache().get(ny, nx, inverse ? FFTW_BACKWARD : FFTW_FORWARD);
  std::vector<cplx> in(npix), out(npix);

  for (int t = 0; t < nt; ++t) {
    cplx* f = g.frame(t);
    for (int y = 0; y < ny; ++y) {
      const cplx* src = f + static_cast<size_t>((y + py) % ny) * nx;
      cplx* dst = in.data() + static_cast<size_t>(y) * nx;
      for (int x = 0; x < nx; ++x) dst[x] = src[(x + px) % nx];
    }
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(in.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
    for (int y = 0; y < ny; ++y) {
      const cplx* src = out.data() + static_cast<size_t>(y) * nx;
      cplx* dst = f + static_cast<size_t>((y + qy) % ny) * nx;
      for (int x = 0; x < nx; ++x) dst[(x + qx) % nx] = s * src[x];
    }
  }
  g.set_domain(g.domain() == Domain::image ? Domain::kspace : Domain::image);
}

}  // namespace coreks

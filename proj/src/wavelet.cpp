#include "coreks/wavelet.hpp"

#include <cmath>

namespace coreks {
namespace {

// A-trous filter passes with periodic wrap, one kernel per axis so memory is
// walked sequentially. Analysis taps sit at +k*step, synthesis at -k*step.

int wrap(int i, int n) {
  i %= n;
  return i < 0 ? i + n : i;
}

void analyze_x(const cplx* in, cplx* lo, cplx* hi, int nx, size_t lines, int step,
               const std::vector<double>& h, const std::vector<double>& g) {
  const int taps = static_cast<int>(h.size());
  std::vector<int> tab(static_cast<size_t>(nx) * taps);
  for (int i = 0; i < nx; ++i)
    for (int k = 0; k < taps; ++k) tab[static_cast<size_t>(i) * taps + k] = wrap(i + k * step, nx);
  for (size_t l = 0; l < lines; ++l) {
    const cplx* r = in + l * nx;
    cplx* lr = lo + l * nx;
    cplx* hr = hi + l * nx;
    for (int i = 0; i < nx; ++i) {
      cplx a{0.0, 0.0}, d{0.0, 0.0};
      const int* ti = tab.data() + static_cast<size_t>(i) * taps;
      for (int k = 0; k < taps; ++k) {
        const cplx v = r[ti[k]];
        a += h[k] * v;
        d += g[k] * v;
      }
      lr[i] = a;
      hr[i] = d;
    }
  }
}

void synthesize_x(const cplx* lo, const cplx* hi, cplx* out, int nx, size_t lines, int step,
                  const std::vector<double>& h, const std::vector<double>& g) {
  const int taps = static_cast<int>(h.size());
  std::vector<int> tab(static_cast<size_t>(nx) * taps);
  for (int i = 0; i < nx; ++i)
    for (int k = 0; k < taps; ++k) tab[static_cast<size_t>(i) * taps + k] = wrap(i - k * step, nx);
  for (size_t l = 0; l < lines; ++l) {
    const cplx* lr = lo + l * nx;
    const cplx* hr = hi + l * nx;
    cplx* o = out + l * nx;
    for (int i = 0; i < nx; ++i) {
      cplx a{0.0, 0.0};
      const int* ti = tab.data() + static_cast<size_t>(i) * taps;
      for (int k = 0; k < taps; ++k) a += h[k] * lr[ti[k]] + g[k] * hr[ti[k]];
      o[i] = a;
    }
  }
}

// Filtering across rows (y) or frames (t): whole-row accumulation keeps the
// access pattern sequential. row_len = nx for y, nx*ny for t.
void analyze_rows(const cplx* in, cplx* lo, cplx* hi, size_t row_len, int n, size_t blocks,
                  int step, const std::vector<double>& h, const std::vector<double>& g) {
  const int taps = static_cast<int>(h.size());
  for (size_t b = 0; b < blocks; ++b) {
    const cplx* base = in + b * row_len * n;
    cplx* lb = lo + b * row_len * n;
    cplx* hb = hi + b * row_len * n;
    for (int y = 0; y < n; ++y) {
      cplx* lr = lb + static_cast<size_t>(y) * row_len;
      cplx* hr = hb + static_cast<size_t>(y) * row_len;
      for (int k = 0; k < taps; ++k) {
        const cplx* src = base + static_cast<size_t>(wrap(y + k * step, n)) * row_len;
        const double hk = h[k], gk = g[k];
        if (k == 0) {
          for (size_t x = 0; x < row_len; ++x) {
            lr[x] = hk * src[x];
            hr[x] = gk * src[x];
          }
        } else {
          for (size_t x = 0; x < row_len; ++x) {
            lr[x] += hk * src[x];
            hr[x] += gk * src[x];
          }
        }
      }
    }
  }
}

void synthesize_rows(const cplx* lo, const cplx* hi, cplx* out, size_t row_len, int n,
                     size_t blocks, int step, const std::vector<double>& h,
                     const std::vector<double>& g) {
  const int taps = static_cast<int>(h.size());
  for (size_t b = 0; b < blocks; ++b) {
    const cplx* lb = lo + b * row_len * n;
    const cplx* hb = hi + b * row_len * n;
    cplx* ob = out + b * row_len * n;
    for (int y = 0; y < n; ++y) {
      cplx* o = ob + static_cast<size_t>(y) * row_len;
      for (int k = 0; k < taps; ++k) {
        const size_t off = static_cast<size_t>(wrap(y - k * step, n)) * row_len;
        const cplx* lr = lb + off;
        const cplx* hr = hb + off;
        const double hk = h[k], gk = g[k];
        if (k == 0) {
          for (size_t x = 0; x < row_len; ++x) o[x] = hk * lr[x] + gk * hr[x];
        } else {
          for (size_t x = 0; x < row_len; ++x) o[x] += hk * lr[x] + gk * hr[x];
        }
      }
    }
  }
}

int checked_levels(int levels, int dim, const char* what) {
  if (levels < 0) throw config_error(std::string(what) + " level count must be non-negative");
  if (levels > 0 && (1 << levels) > dim)
    throw config_error(std::string(what) + " levels infeasible: 2^" + std::to_string(levels) +
                       " exceeds axis size " + std::to_string(dim));
  return levels;
}

}  // namespace

WaveletTransform::WaveletTransform(WaveletConfig cfg, GridDims dims) : cfg_(cfg), dims_(dims) {
  if (cfg.levels_space < 1) throw config_error("levels_space must be >= 1");
  // Length-1 axes reduce to an exact identity/zero split, so feasibility is
  // judged against the larger spatial axis.
  checked_levels(cfg.levels_space, std::max(dims.nx, dims.ny), "spatial");
  lt_ = cfg.levels_time < 0 ? (dims.nt > 1 ? 1 : 0) : cfg.levels_time;
  if (lt_ > 0) checked_levels(lt_, dims.nt, "temporal");

  if (cfg.family == WaveletFamily::haar) {
    h_ = {0.5, 0.5};
    g_ = {0.5, -0.5};
  } else {
    const double s3 = std::sqrt(3.0);
    const double c = 1.0 / (4.0 * std::sqrt(2.0)) / std::sqrt(2.0);
    h_ = {c * (1 + s3), c * (3 + s3), c * (3 - s3), c * (1 - s3)};
    g_ = {h_[3], -h_[2], h_[1], -h_[0]};
  }
}

int WaveletTransform::band_count() const { return (lt_ + 1) * (3 * cfg_.levels_space + 1); }

CoefficientSet WaveletTransform::zeros() const {
  CoefficientSet w;
  w.dims = dims_;
  const int ls = cfg_.levels_space;
  for (int tb = 0; tb <= lt_; ++tb) {
    std::string tl = lt_ == 0 ? "" : (tb < lt_ ? "t" + std::to_string(tb + 1) + "H." : "tL.");
    for (int l = 1; l <= ls; ++l)
      for (const char* b : {"LH", "HL", "HH"}) {
        w.bands.emplace_back(dims_, Domain::image);
        w.labels.push_back(tl + "s" + std::to_string(l) + "." + b);
      }
    w.bands.emplace_back(dims_, Domain::image);
    w.labels.push_back(tl + "s" + std::to_string(ls) + ".LL");
  }
  return w;
}

CoefficientSet WaveletTransform::forward(const ComplexGrid& x) const {
  CoefficientSet w = zeros();
  forward_into(x, w);
  return w;
}

void WaveletTransform::forward_into(const ComplexGrid& x, CoefficientSet& w) const {
  if (!(x.dims() == dims_)) throw contract_error("wavelet forward: dims mismatch");
  if (static_cast<int>(w.bands.size()) != band_count()) w = zeros();

  const int nx = dims_.nx, ny = dims_.ny, nt = dims_.nt;
  const size_t n = dims_.size();
  const size_t npix = static_cast<size_t>(nx) * ny;
  const int ls = cfg_.levels_space;

  // Temporal cascade first: lt_ detail bands plus one approximation.
  std::vector<std::vector<cplx>> tbands;
  {
    std::vector<cplx> approx = x.raw();
    for (int l = 1; l <= lt_; ++l) {
      std::vector<cplx> lo(n), hi(n);
      analyze_rows(approx.data(), lo.data(), hi.data(), npix, nt, 1, 1 << (l - 1), h_, g_);
      tbands.push_back(std::move(hi));
      approx = std::move(lo);
    }
    tbands.push_back(std::move(approx));
  }

  // Spatial cascade on every temporal band.
  int out_band = 0;
  std::vector<cplx> axl(n), axh(n), tmp(n);
  for (std::vector<cplx>& a : tbands) {
    for (int l = 1; l <= ls; ++l) {
      const int step = 1 << (l - 1);
      analyze_x(a.data(), axl.data(), axh.data(), nx, static_cast<size_t>(ny) * nt, step, h_, g_);
      // x-low -> (LL, LH), x-high -> (HL, HH)
      analyze_rows(axl.data(), tmp.data(), w.bands[out_band].raw().data(), nx, ny, nt, step, h_,
                   g_);
      analyze_rows(axh.data(), w.bands[out_band + 1].raw().data(),
                   w.bands[out_band + 2].raw().data(), nx, ny, nt, step, h_, g_);
      out_band += 3;
      a.swap(tmp);
    }
    w.bands[out_band++].raw() = std::move(a);
  }
}

ComplexGrid WaveletTransform::adjoint(const CoefficientSet& w) const {
  ComplexGrid out(dims_, Domain::image);
  adjoint_into(w, out);
  return out;
}

void WaveletTransform::adjoint_into(const CoefficientSet& w, ComplexGrid& out) const {
  if (static_cast<int>(w.bands.size()) != band_count() || !(w.dims == dims_))
    throw contract_error("wavelet adjoint: band shapes do not match configuration");
  for (const ComplexGrid& b : w.bands)
    if (!(b.dims() == dims_)) throw contract_error("wavelet adjoint: band dims mismatch");
  if (!(out.dims() == dims_)) out = ComplexGrid(dims_, Domain::image);

  const int nx = dims_.nx, ny = dims_.ny, nt = dims_.nt;
  const size_t n = dims_.size();
  const size_t npix = static_cast<size_t>(nx) * ny;
  const int ls = cfg_.levels_space;

  // Spatial adjoint per temporal band, innermost level first.
  int band = 0;
  std::vector<std::vector<cplx>> tband_adj;
  std::vector<cplx> t1(n), t2(n), acc(n);
  for (int tb = 0; tb <= lt_; ++tb) {
    acc = w.bands[band + 3 * ls].raw();  // deepest LL
    for (int l = ls; l >= 1; --l) {
      const int step = 1 << (l - 1);
      const std::vector<cplx>& lh = w.bands[band + 3 * (l - 1)].raw();
      const std::vector<cplx>& hl = w.bands[band + 3 * (l - 1) + 1].raw();
      const std::vector<cplx>& hh = w.bands[band + 3 * (l - 1) + 2].raw();
      synthesize_rows(acc.data(), lh.data(), t1.data(), nx, ny, nt, step, h_, g_);
      synthesize_rows(hl.data(), hh.data(), t2.data(), nx, ny, nt, step, h_, g_);
      synthesize_x(t1.data(), t2.data(), acc.data(), nx, static_cast<size_t>(ny) * nt, step, h_,
                   g_);
    }
    tband_adj.push_back(acc);
    band += 3 * ls + 1;
  }

  // Temporal adjoint cascade, deepest level first.
  std::vector<cplx> a = std::move(tband_adj.back());
  for (int l = lt_; l >= 1; --l) {
    synthesize_rows(a.data(), tband_adj[l - 1].data(), t1.data(), npix, nt, 1, 1 << (l - 1), h_,
                    g_);
    a.swap(t1);
  }
  out.raw() = std::move(a);
  out.set_domain(Domain::image);
}

}  // namespace coreks

#include "coreks/container.hpp"

#include <cstdio>
#include <cstring>
#include <memory>

namespace coreks {
namespace {

constexpr char kMagic[7] = {'C', 'O', 'R', 'E', 'K', 'S', '1'};
enum : uint8_t { kGrid = 0, kKSpace = 1, kMask = 2 };
enum : uint8_t { kC64 = 1, kC128 = 2 };

struct Writer {
  FILE* f;
  size_t off = 0;

  explicit Writer(const std::string& path) : f(std::fopen(path.c_str(), "wb")) {
    if (!f) throw io_error("cannot open '" + path + "' for writing");
  }
  ~Writer() {
    if (f) std::fclose(f);
  }

  void bytes(const void* p, size_t n) {
    if (std::fwrite(p, 1, n, f) != n) throw io_error("short write");
    off += n;
  }
  void u8(uint8_t v) { bytes(&v, 1); }
  void u32(uint32_t v) {
    uint8_t b[4] = {static_cast<uint8_t>(v), static_cast<uint8_t>(v >> 8),
                    static_cast<uint8_t>(v >> 16), static_cast<uint8_t>(v >> 24)};
    bytes(b, 4);
  }
  void f64(double v) {
    uint64_t u;
    std::memcpy(&u, &v, 8);
    uint8_t b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<uint8_t>(u >> (8 * i));
    bytes(b, 8);
  }
  void f32v(float v) {
    uint32_t u;
    std::memcpy(&u, &v, 4);
    u32(u);
  }
};

struct Reader {
  FILE* f;
  size_t off = 0;
  std::string path;

  explicit Reader(const std::string& p) : f(std::fopen(p.c_str(), "rb")), path(p) {
    if (!f) throw io_error("cannot open '" + p + "' for reading");
  }
  ~Reader() {
    if (f) std::fclose(f);
  }

  void bytes(void* p, size_t n) {
    if (std::fread(p, 1, n, f) != n)
      throw format_error("'" + path + "' truncated", off);
    off += n;
  }
  uint8_t u8() {
    uint8_t v;
    bytes(&v, 1);
    return v;
  }
  uint32_t u32() {
    uint8_t b[4];
    bytes(b, 4);
    return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
           (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
  }
  double f64() {
    uint8_t b[8];
    bytes(b, 8);
    uint64_t u = 0;
    for (int i = 0; i < 8; ++i) u |= static_cast<uint64_t>(b[i]) << (8 * i);
    double v;
    std::memcpy(&v, &u, 8);
    return v;
  }
  float f32v() {
    uint32_t u = u32();
    float v;
    std::memcpy(&v, &u, 4);
    return v;
  }
};

struct Header {
  uint8_t dtype, kind, domain;
  uint32_t nx, ny, nt, J, K;
};

void write_header(Writer& w, const Header& h) {
  w.bytes(kMagic, 7);
  w.u8(h.dtype);
  w.u8(h.kind);
  w.u8(h.domain);
  w.u8(0);
  w.u8(0);
  w.u32(h.nx);
  w.u32(h.ny);
  w.u32(h.nt);
  w.u32(h.J);
  w.u32(h.K);
}

Header read_header(Reader& r, uint8_t expected_kind) {
  char magic[7];
  r.bytes(magic, 7);
  if (std::memcmp(magic, kMagic, 7) != 0)
    throw format_error("'" + r.path + "' has bad magic", 0);
  Header h;
  h.dtype = r.u8();
  if (h.dtype != kC64 && h.dtype != kC128)
    throw format_error("'" + r.path + "' has unknown dtype " + std::to_string(h.dtype), 7);
  h.kind = r.u8();
  if (h.kind != expected_kind)
    throw format_error("'" + r.path + "' holds kind " + std::to_string(h.kind) + ", expected " +
                           std::to_string(expected_kind),
                       8);
  h.domain = r.u8();
  r.u8();
  r.u8();
  h.nx = r.u32();
  h.ny = r.u32();
  h.nt = r.u32();
  h.J = r.u32();
  h.K = r.u32();
  return h;
}

void write_samples(Writer& w, const std::vector<cplx>& data, bool f32) {
  if (f32) {
    for (const cplx& z : data) {
      w.f32v(static_cast<float>(z.real()));
      w.f32v(static_cast<float>(z.imag()));
    }
  } else {
    for (const cplx& z : data) {
      w.f64(z.real());
      w.f64(z.imag());
    }
  }
}

void read_samples(Reader& r, std::vector<cplx>& data, uint8_t dtype) {
  if (dtype == kC64) {
    for (cplx& z : data) {
      float re = r.f32v(), im = r.f32v();
      z = {re, im};
    }
  } else {
    for (cplx& z : data) {
      double re = r.f64(), im = r.f64();
      z = {re, im};
    }
  }
}

}  // namespace

void save_grid(const std::string& path, const ComplexGrid& g, bool f32) {
  Writer w(path);
  write_header(w, {static_cast<uint8_t>(f32 ? kC64 : kC128), kGrid,
                   static_cast<uint8_t>(g.domain() == Domain::kspace ? 1 : 0),
                   static_cast<uint32_t>(g.dims().nx), static_cast<uint32_t>(g.dims().ny),
                   static_cast<uint32_t>(g.dims().nt), 0, 0});
  write_samples(w, g.raw(), f32);
}

ComplexGrid load_grid(const std::string& path) {
  Reader r(path);
  Header h = read_header(r, kGrid);
  if (h.nx == 0 || h.ny == 0 || h.nt == 0)
    throw format_error("'" + path + "' grid has zero dimension", 12);
  ComplexGrid g({static_cast<int>(h.nx), static_cast<int>(h.ny), static_cast<int>(h.nt)},
                h.domain == 1 ? Domain::kspace : Domain::image);
  read_samples(r, g.raw(), h.dtype);
  return g;
}

void save_kspace(const std::string& path, const KSpaceSet& ks, int ny, int nt, bool f32) {
  Writer w(path);
  write_header(w, {static_cast<uint8_t>(f32 ? kC64 : kC128), kKSpace, 1,
                   static_cast<uint32_t>(ks.K()), static_cast<uint32_t>(ny),
                   static_cast<uint32_t>(nt), static_cast<uint32_t>(ks.J()),
                   static_cast<uint32_t>(ks.K())});
  for (const ReadoutCoord& c : ks.coords()) {
    w.u32(static_cast<uint32_t>(c.pe));
    w.u32(static_cast<uint32_t>(c.frame));
    w.u32(static_cast<uint32_t>(c.coil));
  }
  write_samples(w, ks.raw(), f32);
}

LoadedKSpace load_kspace(const std::string& path) {
  Reader r(path);
  Header h = read_header(r, kKSpace);
  if (h.K == 0) throw format_error("'" + path + "' k-space set has K = 0", 28);
  LoadedKSpace out;
  out.ks = KSpaceSet(static_cast<int>(h.K));
  out.ny = static_cast<int>(h.ny);
  out.nt = static_cast<int>(h.nt);
  out.ks.reserve(h.J);
  for (uint32_t j = 0; j < h.J; ++j) {
    ReadoutCoord c;
    c.pe = static_cast<int>(r.u32());
    c.frame = static_cast<int>(r.u32());
    c.coil = static_cast<int>(r.u32());
    out.ks.add_readout(c);
  }
  read_samples(r, out.ks.raw(), h.dtype);
  out.ks.validate();
  return out;
}

void save_mask(const std::string& path, const SamplingMask& m) {
  Writer w(path);
  write_header(w, {kC128, kMask, 0, 0, static_cast<uint32_t>(m.ny), static_cast<uint32_t>(m.nt),
                   0, 0});
  w.f64(m.r_target);
  w.bytes(m.selected.data(), m.selected.size());
}

SamplingMask load_mask(const std::string& path) {
  Reader r(path);
  Header h = read_header(r, kMask);
  if (h.ny == 0 || h.nt == 0) throw format_error("'" + path + "' mask has zero dimension", 16);
  SamplingMask m(static_cast<int>(h.ny), static_cast<int>(h.nt), 1.0);
  m.r_target = r.f64();
  r.bytes(m.selected.data(), m.selected.size());
  return m;
}

}  // namespace coreks

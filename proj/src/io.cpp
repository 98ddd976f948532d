#include "spinecho/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "spinecho/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

namespace spinecho::io {

namespace {

constexpr size_t kHeaderSize = 64;

struct Writer {
  std::vector<char> bytes;

  void raw(const void* p, size_t n) {
    const char* c = static_cast<const char*>(p);
    bytes.insert(bytes.end(), c, c + n);
  }
  void u32(std::uint32_t v) { raw(&v, 4); }
  void f64(double v) { raw(&v, 8); }
  void pad_to(size_t n) { bytes.resize(n, 0); }
};

struct Reader {
  const std::vector<char>& bytes;
  size_t pos = 0;
  std::string path;

  void raw(void* p, size_t n) {
    // A file that ends mid-structure is malformed content, not an I/O fault.
    if (pos + n > bytes.size())
      throw ParseError(path, 0, 0, "truncated file");
    std::memcpy(p, bytes.data() + pos, n);
    pos += n;
  }
  std::uint32_t u32() {
    std::uint32_t v;
    raw(&v, 4);
    return v;
  }
  double f64() {
    double v;
    raw(&v, 8);
    return v;
  }
};

std::vector<char> slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  return bytes;
}

void dump(const std::string& path, const std::vector<char>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create file: " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write: " + path);
}

}  // namespace

void write_fid(const std::string& path, const processing::Fid2D& fid) {
  if (fid.data.size() !=
      static_cast<size_t>(fid.n_t1) * fid.components * fid.n_t2)
    throw ValidationError("FID dimensions disagree with its data size");
  Writer w;
  w.raw("FID2", 4);
  w.u32(1);
  w.u32(static_cast<std::uint32_t>(fid.n_t1));
  w.u32(static_cast<std::uint32_t>(fid.components));
  w.u32(static_cast<std::uint32_t>(fid.n_t2));
  w.f64(fid.sw1);
  w.f64(fid.sw2);
  w.u32(fid.quadrature == processing::Quadrature::States ? 0u : 1u);
  w.pad_to(kHeaderSize);
  for (const auto& v : fid.data) {
    w.f64(v.real());
    w.f64(v.imag());
  }
  dump(path, w.bytes);
}

processing::Fid2D read_fid(const std::string& path) {
  const auto bytes = slurp(path);
  Reader r{bytes, 0, path};
  char magic[4];
  r.raw(magic, 4);
  if (std::memcmp(magic, "FID2", 4) != 0)
    throw ParseError(path, 0, 0, "not a FID2 file");
  if (r.u32() != 1) throw ParseError(path, 0, 0, "unsupported FID2 version");

  processing::Fid2D fid;
  fid.n_t1 = static_cast<int>(r.u32());
  fid.components = static_cast<int>(r.u32());
  fid.n_t2 = static_cast<int>(r.u32());
  fid.sw1 = r.f64();
  fid.sw2 = r.f64();
  const std::uint32_t quad = r.u32();
  if (quad > 1) throw ParseError(path, 0, 0, "bad quadrature tag");
  fid.quadrature = quad == 0 ? processing::Quadrature::States
                             : processing::Quadrature::EchoAntiecho;
  if (fid.n_t1 < 1 || fid.components < 1 || fid.n_t2 < 1)
    throw ParseError(path, 0, 0, "bad FID2 dimensions");
  r.pos = kHeaderSize;
  fid.resize();
  for (auto& v : fid.data) {
    const double re = r.f64();
    const double im = r.f64();
    v = {re, im};
  }
  return fid;
}

void write_spectrum(const std::string& path, const processing::Spectrum2D& spec) {
  if (spec.values.size() != static_cast<size_t>(spec.n1) * spec.n2)
    throw ValidationError("spectrum dimensions disagree with its data size");
  Writer w;
  w.raw("SPC2", 4);
  w.u32(1);
  w.u32(static_cast<std::uint32_t>(spec.n1));
  w.u32(static_cast<std::uint32_t>(spec.n2));
  w.u32(static_cast<std::uint32_t>(spec.provenance.size()));
  w.f64(spec.f1_first);
  w.f64(spec.f1_step);
  w.f64(spec.f2_first);
  w.f64(spec.f2_step);
  w.pad_to(kHeaderSize);
  for (double v : spec.values) w.f64(v);
  w.raw(spec.provenance.data(), spec.provenance.size());
  dump(path, w.bytes);
}

processing::Spectrum2D read_spectrum(const std::string& path) {
  const auto bytes = slurp(path);
  Reader r{bytes, 0, path};
  char magic[4];
  r.raw(magic, 4);
  if (std::memcmp(magic, "SPC2", 4) != 0)
    throw ParseError(path, 0, 0, "not a SPC2 file");
  if (r.u32() != 1) throw ParseError(path, 0, 0, "unsupported SPC2 version");

  processing::Spectrum2D spec;
  spec.n1 = static_cast<int>(r.u32());
  spec.n2 = static_cast<int>(r.u32());
  const std::uint32_t prov_len = r.u32();
  spec.f1_first = r.f64();
  spec.f1_step = r.f64();
  spec.f2_first = r.f64();
  spec.f2_step = r.f64();
  if (spec.n1 < 1 || spec.n2 < 1)
    throw ParseError(path, 0, 0, "bad SPC2 dimensions");
  r.pos = kHeaderSize;
  spec.values.resize(static_cast<size_t>(spec.n1) * spec.n2);
  for (double& v : spec.values) v = r.f64();
  spec.provenance.resize(prov_len);
  if (prov_len) r.raw(spec.provenance.data(), prov_len);
  return spec;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create file: " + path);
  out << text;
  if (!out) throw IoError("short write: " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace spinecho::io

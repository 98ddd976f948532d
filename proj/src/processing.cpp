#include "spinecho/processing.hpp"

#include <cmath>
#include <sstream>

#include "spinecho/errors.hpp"

namespace spinecho::processing {

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

void fft_inplace(std::vector<cplx>& a, bool inverse) {
  const int n = static_cast<int>(a.size());
  if (!is_pow2(n)) throw ValidationError("FFT size must be a power of two");

  // Bit-reversal permutation.
  for (int i = 1, j = 0; i < n; ++i) {
    int bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  const double sign = inverse ? 1.0 : -1.0;
  for (int len = 2; len <= n; len <<= 1) {
    const int half = len / 2;
    for (int i = 0; i < n; i += len) {
      for (int k = 0; k < half; ++k) {
        const cplx w = std::polar(1.0, sign * 2.0 * M_PI * k / len);
        const cplx u = a[i + k];
        const cplx v = a[i + k + half] * w;
        a[i + k] = u + v;
        a[i + k + half] = u - v;
      }
    }
  }
  if (inverse)
    for (auto& x : a) x /= static_cast<double>(n);
}

namespace {

// FFT then reorder so index 0 is -sw/2 (negative frequencies first).
void fft_shifted(std::vector<cplx>& a) {
  fft_inplace(a, false);
  const int n = static_cast<int>(a.size());
  std::vector<cplx> out(n);
  for (int k = 0; k < n; ++k) out[k] = a[(k + n / 2) % n];
  a = std::move(out);
}

void apply_phase(std::vector<cplx>& a, double ph0_deg, double ph1_deg) {
  if (ph0_deg == 0.0 && ph1_deg == 0.0) return;
  const int n = static_cast<int>(a.size());
  for (int k = 0; k < n; ++k) {
    const double frac = (k - n / 2) / static_cast<double>(n);  // -0.5 .. 0.5
    a[k] *= std::polar(1.0, (ph0_deg + ph1_deg * frac) * M_PI / 180.0);
  }
}

}  // namespace

void apodize(Fid2D& fid, Window along_t2, Window along_t1) {
  if (along_t2 == Window::Sine) {
    for (int k1 = 0; k1 < fid.n_t1; ++k1)
      for (int c = 0; c < fid.components; ++c)
        for (int k2 = 0; k2 < fid.n_t2; ++k2)
          fid.at(k1, c, k2) *= std::sin(M_PI * k2 / fid.n_t2);
  }
  if (along_t1 == Window::Sine) {
    for (int k1 = 0; k1 < fid.n_t1; ++k1) {
      const double w = std::sin(M_PI * k1 / fid.n_t1);
      for (int c = 0; c < fid.components; ++c)
        for (int k2 = 0; k2 < fid.n_t2; ++k2) fid.at(k1, c, k2) *= w;
    }
  }
  // The k = 0 sine-bell weight is zero by construction in both dimensions;
  // that is the unshifted bell's defining property, not a bug.
}

Spectrum2D transform(const Fid2D& fid, const TransformSpec& spec) {
  if (fid.n_t1 <= 0 || fid.n_t2 <= 0 || fid.components != 2)
    throw ValidationError("transform needs a two-component 2D acquisition");
  if (!is_pow2(spec.zf1) || !is_pow2(spec.zf2))
    throw ValidationError("zero-fill sizes must be powers of two");
  if (spec.zf1 < fid.n_t1 || spec.zf2 < fid.n_t2)
    throw ValidationError("zero-fill sizes must not truncate acquired points");

  const int n1 = spec.zf1;
  const int n2 = spec.zf2;

  // Direct dimension: halve the first t2 point, zero-fill, FFT, phase.
  std::vector<std::vector<cplx>> rows(
      static_cast<size_t>(fid.n_t1) * 2, std::vector<cplx>(n2, cplx{}));
  for (int k1 = 0; k1 < fid.n_t1; ++k1) {
    for (int c = 0; c < 2; ++c) {
      auto& row = rows[static_cast<size_t>(k1) * 2 + c];
      for (int k2 = 0; k2 < fid.n_t2; ++k2) row[k2] = fid.at(k1, c, k2);
      row[0] *= 0.5;
      fft_shifted(row);
      apply_phase(row, spec.ph0_f2_deg, spec.ph1_f2_deg);
    }
  }

  // Quadrature recombination into one complex t1 interferogram per column.
  // States keeps the real parts of the two components as the cos/sin pair;
  // echo-antiecho converts P/N components into that pair first.
  std::vector<std::vector<cplx>> cols(n2, std::vector<cplx>(n1, cplx{}));
  for (int k1 = 0; k1 < fid.n_t1; ++k1) {
    const auto& a = rows[static_cast<size_t>(k1) * 2];
    const auto& b = rows[static_cast<size_t>(k1) * 2 + 1];
    for (int k2 = 0; k2 < n2; ++k2) {
      cplx cos_part, sin_part;
      if (fid.quadrature == Quadrature::States) {
        cos_part = a[k2];
        sin_part = b[k2];
      } else {
        cos_part = 0.5 * (a[k2] + b[k2]);
        sin_part = (b[k2] - a[k2]) / cplx(0.0, 2.0);
      }
      cols[k2][k1] = cplx(cos_part.real(), sin_part.real());
    }
  }

  // Indirect dimension: halve the first interferogram point, FFT, phase.
  Spectrum2D out;
  out.n1 = n1;
  out.n2 = n2;
  out.f1_step = fid.sw1 / n1;
  out.f2_step = fid.sw2 / n2;
  out.f1_first = -fid.sw1 / 2.0;
  out.f2_first = -fid.sw2 / 2.0;
  out.values.assign(static_cast<size_t>(n1) * n2, 0.0);

  for (int k2 = 0; k2 < n2; ++k2) {
    auto& col = cols[k2];
    col[0] *= 0.5;
    fft_shifted(col);
    apply_phase(col, spec.ph0_f1_deg, spec.ph1_f1_deg);
    for (int k1 = 0; k1 < n1; ++k1)
      out.at(k1, k2) = spec.magnitude ? std::abs(col[k1]) : col[k1].real();
  }

  std::ostringstream prov;
  prov << "zf1=" << n1 << " zf2=" << n2
       << " ph0_f2=" << spec.ph0_f2_deg << " ph1_f2=" << spec.ph1_f2_deg
       << " ph0_f1=" << spec.ph0_f1_deg << " ph1_f1=" << spec.ph1_f1_deg
       << " mode=" << (spec.magnitude ? "magnitude" : "real")
       << " quadrature="
       << (fid.quadrature == Quadrature::States ? "states" : "echoantiecho")
       << " acquired=" << fid.n_t1 << "x" << fid.n_t2;
  out.provenance = prov.str();
  return out;
}

DigitalResolution digital_resolution(double sw1, int n1, double sw2, int n2) {
  if (n1 <= 0 || n2 <= 0)
    throw ValidationError("digital resolution needs positive grid sizes");
  return {sw1 / n1, sw2 / n2};
}

double natural_resolution_hz(double acquisition_time_s) {
  if (!(acquisition_time_s > 0.0))
    throw ValidationError("acquisition time must be positive");
  return 1.0 / (2.0 * acquisition_time_s);
}

}  // namespace spinecho::processing

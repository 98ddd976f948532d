#pragma once

#include <complex>
#include <string>
#include <vector>

namespace spinecho::processing {

using cplx = std::complex<double>;

// How the two interleaved quadrature components encode the indirect dimension.
enum class Quadrature { States, EchoAntiecho };

// Raw 2D acquisition: complex points laid out [t1 increment][component][t2].
struct Fid2D {
  int n_t1 = 0;
  int components = 2;
  int n_t2 = 0;
  double sw1 = 0.0;  // Hz
  double sw2 = 0.0;
  Quadrature quadrature = Quadrature::States;
  std::vector<cplx> data;

  void resize() { data.assign(static_cast<size_t>(n_t1) * components * n_t2, {}); }
  size_t idx(int k1, int comp, int k2) const {
    return (static_cast<size_t>(k1) * components + comp) * n_t2 + k2;
  }
  cplx& at(int k1, int comp, int k2) { return data[idx(k1, comp, k2)]; }
  const cplx& at(int k1, int comp, int k2) const { return data[idx(k1, comp, k2)]; }
};

// Real-valued 2D spectrum on a centered frequency grid, plus a provenance
// string recording how it was produced.
struct Spectrum2D {
  int n1 = 0;
  int n2 = 0;
  double f1_first = 0.0, f1_step = 0.0;  // axis value of row/col 0 and spacing
  double f2_first = 0.0, f2_step = 0.0;
  std::vector<double> values;  // row-major [f1][f2]
  std::string provenance;

  double& at(int i1, int i2) { return values[static_cast<size_t>(i1) * n2 + i2]; }
  double at(int i1, int i2) const { return values[static_cast<size_t>(i1) * n2 + i2]; }
  double f1(int i1) const { return f1_first + f1_step * i1; }
  double f2(int i2) const { return f2_first + f2_step * i2; }
};

enum class Window { None, Sine };

// In-place apodization: w(k) = sin(pi (k) / n) over each dimension's acquired
// length (unshifted sine bell), applied along t2 rows and t1 columns.
void apodize(Fid2D& fid, Window along_t2, Window along_t1);

struct TransformSpec {
  int zf1 = 256;   // zero-fill sizes; powers of two >= acquired sizes
  int zf2 = 1024;
  double ph0_f2_deg = 0.0, ph1_f2_deg = 0.0;  // zero/first order, F2
  double ph0_f1_deg = 0.0, ph1_f1_deg = 0.0;  // zero/first order, F1
  bool magnitude = false;  // magnitude output instead of the real part
};

// Full 2D transform: halve the first point of every t2 row and of the t1
// interferogram, zero-fill, FFT both dimensions with quadrature recombination
// (States: C = Re(A) + i Re(B) after F2 phasing; echo-antiecho: sum/difference
// first), apply phase corrections, return the real part (or magnitude).
// Frequency axes run from -sw/2 upward in steps of sw/zf.
Spectrum2D transform(const Fid2D& fid, const TransformSpec& spec);

// Hz per point of the final grid.
struct DigitalResolution {
  double f1_hz_per_pt = 0.0;
  double f2_hz_per_pt = 0.0;
};
DigitalResolution digital_resolution(double sw1, int n1, double sw2, int n2);

// Resolving power of the acquisition itself: 1/(2 aq).
double natural_resolution_hz(double acquisition_time_s);

// Radix-2 in-place FFT, forward kernel e^{-2 pi i k n / N}; inverse divides by
// N. Size must be a power of two. Exposed for direct testing against a naive
// DFT.
void fft_inplace(std::vector<cplx>& a, bool inverse);
bool is_pow2(int n);

}  // namespace spinecho::processing

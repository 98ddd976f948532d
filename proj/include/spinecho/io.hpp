#pragma once

#include <string>

#include "spinecho/processing.hpp"

namespace spinecho::io {

// FID2: little-endian binary 2D acquisition.
//   offset  0: magic "FID2"
//   offset  4: u32 version (1)
//   offset  8: u32 n_t1
//   offset 12: u32 components
//   offset 16: u32 n_t2
//   offset 20: f64 sw1 (Hz)
//   offset 28: f64 sw2 (Hz)
//   offset 36: u32 quadrature (0 = states, 1 = echo-antiecho)
//   offset 40: 24 reserved zero bytes
//   offset 64: complex f64 pairs (re, im), layout [t1][component][t2]
void write_fid(const std::string& path, const processing::Fid2D& fid);
processing::Fid2D read_fid(const std::string& path);

// SPC2: little-endian binary real 2D spectrum.
//   offset  0: magic "SPC2"
//   offset  4: u32 version (1)
//   offset  8: u32 n1
//   offset 12: u32 n2
//   offset 16: u32 provenance byte length
//   offset 20: f64 f1_first   (Hz of row 0)
//   offset 28: f64 f1_step
//   offset 36: f64 f2_first
//   offset 44: f64 f2_step
//   offset 52: 12 reserved zero bytes
//   offset 64: n1*n2 f64 values, row-major [f1][f2]
//   then    : provenance bytes (UTF-8)
void write_spectrum(const std::string& path, const processing::Spectrum2D& spec);
processing::Spectrum2D read_spectrum(const std::string& path);

// Whole-file text helpers.
void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace spinecho::io

#pragma once

#include <string>
#include <vector>

#include "spinecho/processing.hpp"

namespace spinecho::analysis {

enum class PeakKind { Diagonal, Cross };

enum class Lineshape {
  AntiphaseAbsorptive,
  InphaseAbsorptive,
  Dispersive,
  Mixed,
};

std::string to_string(PeakKind k);
std::string to_string(Lineshape s);

// One multiplet: the grouped set of extrema belonging to a single correlation.
struct Peak {
  double f1_hz = 0.0;  // position of the strongest extremum
  double f2_hz = 0.0;
  double amplitude = 0.0;  // largest |value| in the multiplet
  PeakKind kind = PeakKind::Cross;
  Lineshape lineshape = Lineshape::Mixed;
  // |sum| / sum|v| over the multiplet footprint: near zero for antiphase
  // multiplets, near one for inphase ones.
  double net_integral_ratio = 0.0;
};

struct PeakTable {
  std::vector<Peak> peaks;  // sorted by (f1, f2)
};

struct PickOptions {
  double threshold = 0.05;    // of the global |max|
  double diag_tol_hz = 10.0;  // |f1 - f2| band classified as diagonal
  double group_window_hz = 12.0;  // extrema closer than this merge into one multiplet
};

// Local extrema of |v| above threshold, greedily clustered (strongest first)
// into multiplets within group_window_hz along both axes.
PeakTable pick_peaks(const processing::Spectrum2D& spec, const PickOptions& opt);

// Classify the multiplet contained in the index box [i1_lo,i1_hi]x[i2_lo,i2_hi]
// (inclusive). Works on signed intensity profiles through the strongest point.
Lineshape classify_lineshape(const processing::Spectrum2D& spec, int i1_lo,
                             int i1_hi, int i2_lo, int i2_hi);

// Suppression metrics between a reference spectrum (e.g. conventional) and a
// test spectrum (e.g. diagonal-free) on the same grid.
struct SuppressionReport {
  double max_diag_ref = 0.0;   // largest |v| in the diagonal band, reference
  double max_diag_test = 0.0;  // same band, test spectrum
  double max_cross_test = 0.0; // largest |v| outside the band, test spectrum
  double suppression_db = 0.0; // 20 log10(max_diag_ref / max_diag_test)
  double residual_fraction = 0.0;  // max_diag_test / max_cross_test
};

SuppressionReport compare(const processing::Spectrum2D& ref,
                          const processing::Spectrum2D& test, double diag_tol_hz);

// "key = value" lines, one per field.
std::string serialize(const SuppressionReport& r);
std::string serialize(const PeakTable& t);  // TSV with a header row

}  // namespace spinecho::analysis

#include "spinecho/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "spinecho/errors.hpp"

namespace spinecho::analysis {

std::string to_string(PeakKind k) {
  return k == PeakKind::Diagonal ? "diagonal" : "cross";
}

std::string to_string(Lineshape s) {
  switch (s) {
    case Lineshape::AntiphaseAbsorptive: return "antiphase_absorptive";
    case Lineshape::InphaseAbsorptive: return "inphase_absorptive";
    case Lineshape::Dispersive: return "dispersive";
    case Lineshape::Mixed: return "mixed";
  }
  return "mixed";
}

namespace {

struct Extremum {
  int i1 = 0, i2 = 0;
  double value = 0.0;
};

// Signed 1D profile analysis shared by both spectrum axes.
enum class AxisShape { SingleAbsorptive, InphaseMultiplet, Antiphase, DispersivePair };

struct Lobe {
  int index = 0;
  double value = 0.0;
};

AxisShape classify_profile(const std::vector<double>& v) {
  const int n = static_cast<int>(v.size());
  double vmax = 0.0;
  for (double x : v) vmax = std::max(vmax, std::abs(x));
  if (vmax == 0.0) return AxisShape::SingleAbsorptive;

  // Significant lobes: local |v| maxima above 30% of the profile maximum.
  std::vector<Lobe> lobes;
  for (int i = 0; i < n; ++i) {
    const double a = std::abs(v[i]);
    if (a < 0.3 * vmax) continue;
    const double left = i > 0 ? std::abs(v[i - 1]) : 0.0;
    const double right = i + 1 < n ? std::abs(v[i + 1]) : 0.0;
    if (a >= left && a > right) lobes.push_back({i, v[i]});
    else if (a >= left && i + 1 == n) lobes.push_back({i, v[i]});
  }
  if (lobes.size() <= 1) return AxisShape::SingleAbsorptive;

  bool sign_change = false;
  for (size_t i = 1; i < lobes.size(); ++i)
    if (lobes[i].value * lobes[i - 1].value < 0.0) sign_change = true;
  if (!sign_change) return AxisShape::InphaseMultiplet;

  // Strongest opposite-sign pair: separation vs. the linewidth decides
  // antiphase doublet (well separated) against a dispersive up/down pair
  // (extrema roughly one linewidth apart).
  const Lobe* pos = nullptr;
  const Lobe* neg = nullptr;
  for (const auto& l : lobes) {
    if (l.value > 0.0 && (!pos || l.value > pos->value)) pos = &l;
    if (l.value < 0.0 && (!neg || l.value < neg->value)) neg = &l;
  }
  const Lobe* strongest = std::abs(pos->value) >= std::abs(neg->value) ? pos : neg;

  // Full width at half maximum of the strongest lobe, in index units.
  const double half = 0.5 * std::abs(strongest->value);
  int lo = strongest->index;
  while (lo > 0 && std::abs(v[lo - 1]) > half && std::abs(v[lo - 1]) < std::abs(v[lo]))
    --lo;
  int hi = strongest->index;
  while (hi + 1 < n && std::abs(v[hi + 1]) > half && std::abs(v[hi + 1]) < std::abs(v[hi]))
    ++hi;
  const double width = std::max(1, hi - lo);
  const double separation = std::abs(pos->index - neg->index);

  return separation >= 1.6 * width ? AxisShape::Antiphase : AxisShape::DispersivePair;
}

}  // namespace

Lineshape classify_lineshape(const processing::Spectrum2D& spec, int i1_lo,
                             int i1_hi, int i2_lo, int i2_hi) {
  i1_lo = std::clamp(i1_lo, 0, spec.n1 - 1);
  i1_hi = std::clamp(i1_hi, 0, spec.n1 - 1);
  i2_lo = std::clamp(i2_lo, 0, spec.n2 - 1);
  i2_hi = std::clamp(i2_hi, 0, spec.n2 - 1);
  if (i1_hi < i1_lo || i2_hi < i2_lo)
    throw ValidationError("empty region for lineshape classification");

  int p1 = i1_lo, p2 = i2_lo;
  double best = -1.0;
  for (int i1 = i1_lo; i1 <= i1_hi; ++i1)
    for (int i2 = i2_lo; i2 <= i2_hi; ++i2)
      if (std::abs(spec.at(i1, i2)) > best) {
        best = std::abs(spec.at(i1, i2));
        p1 = i1;
        p2 = i2;
      }

  std::vector<double> along_f2, along_f1;
  for (int i2 = i2_lo; i2 <= i2_hi; ++i2) along_f2.push_back(spec.at(p1, i2));
  for (int i1 = i1_lo; i1 <= i1_hi; ++i1) along_f1.push_back(spec.at(i1, p2));

  const AxisShape s2 = classify_profile(along_f2);
  const AxisShape s1 = classify_profile(along_f1);

  if (s1 == AxisShape::DispersivePair || s2 == AxisShape::DispersivePair)
    return Lineshape::Dispersive;
  if (s1 == AxisShape::Antiphase && s2 == AxisShape::Antiphase)
    return Lineshape::AntiphaseAbsorptive;
  const auto inphase = [](AxisShape s) {
    return s == AxisShape::SingleAbsorptive || s == AxisShape::InphaseMultiplet;
  };
  if (inphase(s1) && inphase(s2)) return Lineshape::InphaseAbsorptive;
  return Lineshape::Mixed;
}

PeakTable pick_peaks(const processing::Spectrum2D& spec, const PickOptions& opt) {
  if (spec.n1 <= 0 || spec.n2 <= 0)
    throw ValidationError("cannot pick peaks on an empty spectrum");
  if (!(opt.threshold > 0.0) || opt.threshold >= 1.0)
    throw ValidationError("peak threshold must lie in (0, 1)");

  double global = 0.0;
  for (double v : spec.values) global = std::max(global, std::abs(v));
  PeakTable out;
  if (global == 0.0) return out;

  // Local extrema of |v| above threshold.
  std::vector<Extremum> extrema;
  for (int i1 = 0; i1 < spec.n1; ++i1) {
    for (int i2 = 0; i2 < spec.n2; ++i2) {
      const double a = std::abs(spec.at(i1, i2));
      if (a < opt.threshold * global) continue;
      bool is_max = true;
      for (int d1 = -1; d1 <= 1 && is_max; ++d1) {
        for (int d2 = -1; d2 <= 1 && is_max; ++d2) {
          if (d1 == 0 && d2 == 0) continue;
          const int j1 = i1 + d1;
          const int j2 = i2 + d2;
          if (j1 < 0 || j1 >= spec.n1 || j2 < 0 || j2 >= spec.n2) continue;
          if (std::abs(spec.at(j1, j2)) > a) is_max = false;
        }
      }
      if (is_max) extrema.push_back({i1, i2, spec.at(i1, i2)});
    }
  }

  std::sort(extrema.begin(), extrema.end(), [](const Extremum& a, const Extremum& b) {
    if (std::abs(a.value) != std::abs(b.value))
      return std::abs(a.value) > std::abs(b.value);
    if (a.i1 != b.i1) return a.i1 < b.i1;
    return a.i2 < b.i2;
  });

  struct Multiplet {
    Extremum seed;
    int i1_lo, i1_hi, i2_lo, i2_hi;
  };
  std::vector<Multiplet> groups;
  for (const auto& e : extrema) {
    bool joined = false;
    for (auto& g : groups) {
      const double d1 = std::abs(spec.f1(e.i1) - spec.f1(g.seed.i1));
      const double d2 = std::abs(spec.f2(e.i2) - spec.f2(g.seed.i2));
      if (d1 <= opt.group_window_hz && d2 <= opt.group_window_hz) {
        g.i1_lo = std::min(g.i1_lo, e.i1);
        g.i1_hi = std::max(g.i1_hi, e.i1);
        g.i2_lo = std::min(g.i2_lo, e.i2);
        g.i2_hi = std::max(g.i2_hi, e.i2);
        joined = true;
        break;
      }
    }
    if (!joined) groups.push_back({e, e.i1, e.i1, e.i2, e.i2});
  }

  const int pad1 = std::max(1, static_cast<int>(std::lround(
                                  0.5 * opt.group_window_hz / spec.f1_step)));
  const int pad2 = std::max(1, static_cast<int>(std::lround(
                                  0.5 * opt.group_window_hz / spec.f2_step)));
  for (const auto& g : groups) {
    const int b1_lo = std::max(0, g.i1_lo - pad1);
    const int b1_hi = std::min(spec.n1 - 1, g.i1_hi + pad1);
    const int b2_lo = std::max(0, g.i2_lo - pad2);
    const int b2_hi = std::min(spec.n2 - 1, g.i2_hi + pad2);

    double amp = 0.0;
    double net = 0.0, total = 0.0;
    for (int i1 = b1_lo; i1 <= b1_hi; ++i1) {
      for (int i2 = b2_lo; i2 <= b2_hi; ++i2) {
        amp = std::max(amp, std::abs(spec.at(i1, i2)));
        net += spec.at(i1, i2);
        total += std::abs(spec.at(i1, i2));
      }
    }

    Peak p;
    p.f1_hz = spec.f1(g.seed.i1);
    p.f2_hz = spec.f2(g.seed.i2);
    p.amplitude = amp;
    p.kind = std::abs(p.f1_hz - p.f2_hz) <= opt.diag_tol_hz ? PeakKind::Diagonal
                                                            : PeakKind::Cross;
    p.lineshape = classify_lineshape(spec, b1_lo, b1_hi, b2_lo, b2_hi);
    p.net_integral_ratio = total > 0.0 ? std::abs(net) / total : 0.0;
    out.peaks.push_back(p);
  }

  std::sort(out.peaks.begin(), out.peaks.end(), [](const Peak& a, const Peak& b) {
    if (a.f1_hz != b.f1_hz) return a.f1_hz < b.f1_hz;
    return a.f2_hz < b.f2_hz;
  });
  return out;
}

SuppressionReport compare(const processing::Spectrum2D& ref,
                          const processing::Spectrum2D& test, double diag_tol_hz) {
  if (ref.n1 != test.n1 || ref.n2 != test.n2 ||
      std::abs(ref.f1_step - test.f1_step) > 1e-12 ||
      std::abs(ref.f2_step - test.f2_step) > 1e-12 ||
      std::abs(ref.f1_first - test.f1_first) > 1e-9 ||
      std::abs(ref.f2_first - test.f2_first) > 1e-9)
    throw ValidationError("spectra live on different grids; cannot compare");

  SuppressionReport r;
  double ref_any = 0.0, test_any = 0.0;
  for (int i1 = 0; i1 < ref.n1; ++i1) {
    for (int i2 = 0; i2 < ref.n2; ++i2) {
      const bool diag = std::abs(ref.f1(i1) - ref.f2(i2)) <= diag_tol_hz;
      const double a = std::abs(ref.at(i1, i2));
      const double b = std::abs(test.at(i1, i2));
      ref_any = std::max(ref_any, a);
      test_any = std::max(test_any, b);
      if (diag) {
        r.max_diag_ref = std::max(r.max_diag_ref, a);
        r.max_diag_test = std::max(r.max_diag_test, b);
      } else {
        r.max_cross_test = std::max(r.max_cross_test, b);
      }
    }
  }
  if (ref_any == 0.0 && test_any == 0.0)
    throw ValidationError("both spectra are identically zero; nothing to compare");
  if (r.max_diag_ref == 0.0)
    throw ValidationError("reference spectrum has no diagonal-band signal");

  // Floor the ratios so a perfectly suppressed diagonal stays finite.
  const double floor_amp = 1e-12 * r.max_diag_ref;
  r.suppression_db =
      20.0 * std::log10(r.max_diag_ref / std::max(r.max_diag_test, floor_amp));
  r.residual_fraction = r.max_diag_test / std::max(r.max_cross_test, floor_amp);
  return r;
}

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

std::string serialize(const SuppressionReport& r) {
  std::ostringstream out;
  out << "max_diag_amp_ref = " << num(r.max_diag_ref) << "\n";
  out << "max_diag_amp_test = " << num(r.max_diag_test) << "\n";
  out << "max_cross_amp_test = " << num(r.max_cross_test) << "\n";
  out << "suppression_db = " << num(r.suppression_db) << "\n";
  out << "residual_fraction = " << num(r.residual_fraction) << "\n";
  return out.str();
}

std::string serialize(const PeakTable& t) {
  std::ostringstream out;
  out << "f1_hz\tf2_hz\tamplitude\tkind\tlineshape\tnet_integral_ratio\n";
  for (const auto& p : t.peaks) {
    out << num(p.f1_hz) << "\t" << num(p.f2_hz) << "\t" << num(p.amplitude)
        << "\t" << to_string(p.kind) << "\t" << to_string(p.lineshape) << "\t"
        << num(p.net_integral_ratio) << "\n";
  }
  return out.str();
}

}  // namespace spinecho::analysis

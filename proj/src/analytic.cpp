#include "spinecho/analytic.hpp"

#include <cmath>

#include "spinecho/errors.hpp"

namespace spinecho::analytic {

namespace {

struct Trig {
  double cc, sc, cs, ss;
};

// The four products of offset and coupling trigs that tag every term.
Trig trigs(double omega1, double j_hz, double t1) {
  const double co = std::cos(omega1 * t1);
  const double so = std::sin(omega1 * t1);
  const double cj = std::cos(M_PI * j_hz * t1);
  const double sj = std::sin(M_PI * j_hz * t1);
  return {co * cj, so * cj, co * sj, so * sj};
}

}  // namespace

Terms premix_terms(double omega1, double j_hz, double t1) {
  const Trig t = trigs(omega1, j_hz, t1);
  return {
      {"I1Y", -t.cc, true},
      {"I1X", t.sc, true},
      {"2I1XI2Z", -t.cs, true},
      {"2I1YI2Z", t.ss, true},
  };
}

Terms postmix_terms(double omega1, double j_hz, double t1) {
  const Trig t = trigs(omega1, j_hz, t1);
  return {
      {"I1Z", -t.cc, true},
      {"I1X", t.sc, true},
      {"2I1XI2Y", t.cs, true},
      {"2I1ZI2Y", t.ss, true},
  };
}

Terms prepurge_terms(double omega1, double j_hz, double t1) {
  const Trig t = trigs(omega1, j_hz, t1);
  return {
      // Diagonal pathway: back-transfer makes it proton-carbon antiphase,
      // which the purge pulse turns into multiple quantum.
      {"2I1YSZ", t.sc, false},
      // Cross pathway to an unlabeled partner: untouched, observable.
      {"2I1ZI2Y", t.ss, true},
  };
}

Terms prepurge_terms_geminal(double omega1, double j_hz, double t1) {
  const Trig t = trigs(omega1, j_hz, t1);
  return {
      {"2I1YSZ", t.sc, false},
      // The partner shares the carbon, so the cross term also acquires carbon
      // antiphase and is purged along with the diagonal.
      {"2I1ZI2XSZ", t.ss, false},
  };
}

double residual_inphase_fraction(double j_true_hz, double j_tuned_hz) {
  if (j_tuned_hz == 0.0)
    throw ValidationError("residual fraction needs a nonzero tuned coupling");
  return std::cos(0.5 * M_PI * j_true_hz / j_tuned_hz);
}

std::vector<LabelMap> engine_label_map(int p1, int p2, int c) {
  const std::string s1 = std::to_string(p1);
  const std::string s2 = std::to_string(p2);
  const std::string sc = std::to_string(c);
  // Per-axis signs: X -> -x, Y -> +y, Z -> +z, SZ -> -z(carbon). The two
  // entries marked below depart from the per-axis product; they compensate a
  // sign convention inconsistency inside the closed forms (the checkpoint
  // tests pin every entry numerically).
  return {
      {"I1X", "I" + s1 + "x", -1.0},
      {"I1Y", "I" + s1 + "y", 1.0},
      {"I1Z", "I" + s1 + "z", 1.0},
      {"2I1XI2Z", "2I" + s1 + "xI" + s2 + "z", -1.0},
      {"2I1YI2Z", "2I" + s1 + "yI" + s2 + "z", -1.0},  // non-multiplicative
      {"2I1XI2Y", "2I" + s1 + "xI" + s2 + "y", -1.0},
      {"2I1ZI2Y", "2I" + s1 + "zI" + s2 + "y", 1.0},
      {"2I1YSZ", "2I" + s1 + "yI" + sc + "z", -1.0},
      {"2I1ZI2XSZ", "4I" + s1 + "zI" + s2 + "xI" + sc + "z", -1.0},  // non-multiplicative
  };
}

std::string engine_expr_for(const std::string& label, int p1, int p2, int c,
                            double* sign) {
  for (const auto& m : engine_label_map(p1, p2, c)) {
    if (m.label == label) {
      if (sign) *sign = m.sign;
      return m.engine_expr;
    }
  }
  throw ValidationError("no engine mapping for closed-form label '" + label + "'");
}

}  // namespace spinecho::analytic

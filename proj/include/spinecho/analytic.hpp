#pragma once

#include <string>
#include <vector>

namespace spinecho::analytic {

// Closed-form predictions for the checkpoint states of the diagonal-free
// correlation sequence, written in product-operator language. Everything here
// is plain trigonometry - no matrix algebra - so these functions serve as an
// independent oracle for the propagation engine.
//
// Labels use the conventional X/Y/Z names with spin 1 the carbon-edited
// proton, spin 2 its proton coupling partner, S the bonded carbon. A label
// like "2I1XI2Z" names the normalized two-spin product operator.

struct OperatorTerm {
  std::string label;
  double coefficient = 0.0;
  // False when the final carbon purge pulse converts the term to unobservable
  // multiple-quantum coherence.
  bool observable_after_purge = true;
};

using Terms = std::vector<OperatorTerm>;

// State entering the mixing pulse after the edited proton (offset omega1 in
// rad/s, proton-proton coupling j_hz) has evolved for t1 under its offset and
// the proton-proton coupling.
Terms premix_terms(double omega1_rad_s, double j_hz, double t1_s);

// The same state after the 90 degree proton mixing pulse.
Terms postmix_terms(double omega1_rad_s, double j_hz, double t1_s);

// State just before the final carbon purge pulse when the t1 partner (spin 2)
// sits on an unlabeled neighboring site: the back-transfer turns the diagonal
// term into proton-carbon antiphase (purged) while the transferred antiphase
// term survives untouched.
Terms prepurge_terms(double omega1_rad_s, double j_hz, double t1_s);

// Same point for a geminal pair (spins 1 and 2 bonded to the same labeled
// carbon): the transferred term also picks up carbon antiphase and dies at the
// purge pulse, so nothing observable remains.
Terms prepurge_terms_geminal(double omega1_rad_s, double j_hz, double t1_s);

// Fraction of inphase proton magnetization surviving the back-transfer
// interval when the actual one-bond coupling is j_true_hz but the delays were
// tuned for j_tuned_hz: cos(pi/2 * j_true/j_tuned). Zero at a perfect match.
double residual_inphase_fraction(double j_true_hz, double j_tuned_hz);

// ---------------------------------------------------------------------------
// Translation between the closed-form labels above and this engine's operator
// expressions, for the quadrature component whose t1-preparation proton pulse
// has phase y (component 1 of the interleaved pair) at scan 0. The engine
// rotation convention (90x: Iz -> -Iy) differs from the one the closed forms
// are written in, so each label carries a sign. Two composite entries are
// deliberately non-multiplicative in the per-axis signs; they absorb a sign
// convention mixed into the closed forms themselves (verified numerically).

struct LabelMap {
  std::string label;        // closed-form name, e.g. "2I1YI2Z"
  std::string engine_expr;  // engine expression, e.g. "2I1yI2z"
  double sign = 1.0;
};

// proton1/proton2/carbon are the spin ids to substitute. Entries cover every
// label emitted by the Terms functions above.
std::vector<LabelMap> engine_label_map(int proton1, int proton2, int carbon);

// Lookup helper; throws ValidationError for an unknown label.
std::string engine_expr_for(const std::string& label, int proton1, int proton2,
                            int carbon, double* sign);

}  // namespace spinecho::analytic

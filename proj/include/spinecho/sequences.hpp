#pragma once

#include <string>
#include <vector>

#include "spinecho/processing.hpp"
#include "spinecho/pulseprog.hpp"
#include "spinecho/spinsys.hpp"

namespace spinecho::sequences {

// ---------------------------------------------------------------------------
// Bundled sequences. Each builder reproduces the matching program in seq/
// exactly (asserted by tests), so the two stay interchangeable.

// Carbon-edited diagonal-free correlation experiment: out-and-back one-bond
// editing around the t1 evolution, coherence selection on the 15:15 gradient
// pair, and a final carbon purge pulse that removes the diagonal pathway.
pulseprog::EventList build_diagonal_free_cosy(double tau_s = 1.5625e-3);

// Plain two-pulse correlation control with echo-antiecho gradient selection.
pulseprog::EventList build_conventional_cosy();

// One-bond editing block on its own: proton -> two-spin order -> proton.
pulseprog::EventList build_inept_block(double tau_s = 1.5625e-3);

// ---------------------------------------------------------------------------
// Experiment plan and engine configuration.

struct ExperimentPlan {
  pulseprog::EventList seq;
  double sw1 = 700.0;          // Hz, indirect
  double sw2 = 700.0;          // Hz, direct
  int n_t1 = 64;               // acquired increments (per component)
  int n_t2 = 256;              // acquired complex points
  int scans = 2;               // phase-cycle steps summed per increment
  int dummy_scans = 0;         // accepted for protocol fidelity; without a
  double recovery_s = 1.8;     // relaxation model neither alters the result
  double tau_s = 0.0;          // 0: take the program symbol, else 1/(4 j1ch)
  processing::Quadrature quadrature = processing::Quadrature::States;
};

enum class GradientMode { Slices, Exact };
enum class ExecMode { Parallel, Serial };

struct EngineConfig {
  GradientMode gradient_mode = GradientMode::Slices;
  int n_slices = 64;
  double grad_phase_per_unit = 3.14159265358979323846;
  // Validation switch: suspend proton-proton couplings during fixed `delay`
  // events (only there - t1 and acquisition keep them). The closed-form
  // checkpoint algebra neglects exactly that evolution.
  bool homonuclear_in_fixed_delays = true;
  ExecMode exec = ExecMode::Parallel;
  int threads = 0;  // 0: library default
};

// ---------------------------------------------------------------------------
// Checkpoint capture: at every `mark` event, project the instantaneous state
// of each propagation job onto a caller-supplied list of product operators.

struct CheckpointRequest {
  std::vector<std::string> operators;  // e.g. {"I1x", "2I1zI2y"}
};

struct CheckpointRecord {
  std::string label;
  int t1_index = 0;
  int component = 0;
  int scan = 0;
  int isotopomer = 0;
  // One coefficient per requested operator; NaN when the operator references
  // a spin this isotopomer does not carry.
  std::vector<double> coefficients;
};

struct CheckpointCapture {
  std::vector<std::string> operators;
  std::vector<CheckpointRecord> records;
};

// ---------------------------------------------------------------------------
// Drivers. Both produce identical output bit for bit; run_experiment
// parallelizes over (t1 increment x component) jobs with a fixed-order
// reduction, run_experiment_reference is the straightforward nested loop kept
// as the ground truth for testing.

processing::Fid2D run_experiment(const ExperimentPlan& plan,
                                 const std::vector<spinsys::Isotopomer>& isotopomers,
                                 const EngineConfig& cfg,
                                 const CheckpointRequest* request = nullptr,
                                 CheckpointCapture* capture = nullptr);

processing::Fid2D run_experiment_reference(
    const ExperimentPlan& plan, const std::vector<spinsys::Isotopomer>& isotopomers,
    const EngineConfig& cfg, const CheckpointRequest* request = nullptr,
    CheckpointCapture* capture = nullptr);

// The tau actually used by a run (plan override, program symbol, or derived
// as 1/(4 j1ch) so the editing interval 2*tau matches 1/(2 j1ch)).
double resolve_tau(const ExperimentPlan& plan,
                   const std::vector<spinsys::Isotopomer>& isotopomers);

}  // namespace spinecho::sequences

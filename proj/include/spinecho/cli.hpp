#pragma once

#include <ostream>
#include <string>

namespace spinecho::cli {

// Process exit codes. Parse failures (spin systems, pulse programs, binary
// files with bad magic) map to 2, semantic validation failures to 3, missing
// or unwritable files to 4, anything unexpected to 1.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUnexpected = 1;
inline constexpr int kExitParse = 2;
inline constexpr int kExitValidation = 3;
inline constexpr int kExitIo = 4;

struct SimulateArgs {
  std::string system_path;
  std::string sequence = "diagfree";  // builtin name or a .pp file path
  std::string out_path;
  std::string checkpoints_path;  // optional TSV of checkpoint projections
  std::string checkpoint_ops;    // comma-separated operator expressions
  double sw1 = 700.0, sw2 = 700.0;      // Hz
  double aq1 = 0.090, aq2 = 0.250;      // s; points = ceil(aq * sw)
  int scans = 2;
  int dummy_scans = 0;
  double recovery_s = 1.8;
  double tau_s = 0.0;  // 0: program symbol or derived from the one-bond J
  std::string quadrature = "states";  // or "echoantiecho"
  int slices = 64;
  bool ideal_gradients = false;
  int threads = 0;
  bool serial = false;
};

struct ProcessArgs {
  std::string in_path;
  std::string out_path;
  std::string window_t2 = "sine";  // "none" or "sine"
  std::string window_t1 = "sine";
  int zf1 = 256, zf2 = 1024;
  double ph0_f2 = 0.0, ph1_f2 = 0.0;
  double ph0_f1 = 0.0, ph1_f1 = 0.0;
  bool magnitude = false;
};

struct PeaksArgs {
  std::string in_path;
  std::string out_path;  // empty: stdout
  double threshold = 0.05;
  double diag_tol_hz = 0.0;  // 0: two grid cells of the coarser axis
  double group_window_hz = 12.0;
};

struct CompareArgs {
  std::string ref_path;
  std::string test_path;
  std::string out_path;  // empty: stdout
  double diag_tol_hz = 10.0;
};

// Each command throws spinecho exceptions on failure; use guarded() to turn
// those into exit codes and stderr messages.
int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err);
int cmd_process(const ProcessArgs& args, std::ostream& out, std::ostream& err);
int cmd_peaks(const PeaksArgs& args, std::ostream& out, std::ostream& err);
int cmd_compare(const CompareArgs& args, std::ostream& out, std::ostream& err);

template <class Fn>
int guarded(Fn&& fn, std::ostream& err);

int exit_code_for(const std::exception& e);

template <class Fn>
int guarded(Fn&& fn, std::ostream& err) {
  try {
    return fn();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

}  // namespace spinecho::cli

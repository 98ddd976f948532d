#include <iostream>

#include "CLI11.hpp"
#include "spinecho/cli.hpp"
#include "spinecho/version.hpp"

namespace cli = spinecho::cli;

int main(int argc, char** argv) {
  CLI::App app{"Liquid-state NMR simulator: carbon-edited diagonal-free correlation experiments"};
  app.set_version_flag("--version", std::string(spinecho::kVersion));
  app.require_subcommand(1);

  cli::SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run a pulse program and write a 2D FID");
  simulate->add_option("--system", sim.system_path, "Spin system file (.spin)")->required();
  simulate->add_option("--seq", sim.sequence,
                       "Builtin sequence (diagfree | cosy | inept) or a .pp file");
  simulate->add_option("--out", sim.out_path, "Output FID file")->required();
  simulate->add_option("--sw1", sim.sw1, "Indirect spectral width, Hz");
  simulate->add_option("--sw2", sim.sw2, "Direct spectral width, Hz");
  simulate->add_option("--aq1", sim.aq1, "Indirect acquisition time, s (points = ceil(aq*sw))");
  simulate->add_option("--aq2", sim.aq2, "Direct acquisition time, s");
  simulate->add_option("--scans", sim.scans, "Phase-cycle scans per increment");
  simulate->add_option("--dummy-scans", sim.dummy_scans, "Dummy scans before acquisition");
  simulate->add_option("--recovery", sim.recovery_s, "Recovery delay between scans, s");
  simulate->add_option("--tau", sim.tau_s,
                       "Editing delay, s (default: program symbol or 1/(4 j1ch))");
  simulate->add_option("--quadrature", sim.quadrature, "states | echoantiecho");
  simulate->add_option("--slices", sim.slices, "Gradient spatial slices");
  simulate->add_flag("--ideal-gradients", sim.ideal_gradients,
                     "Coherence-order bookkeeping instead of spatial slices");
  simulate->add_option("--threads", sim.threads, "Worker threads (0 = library default)");
  simulate->add_flag("--serial", sim.serial, "Use the serial reference driver");
  simulate->add_option("--checkpoints", sim.checkpoints_path,
                       "Write per-mark operator projections to this TSV file");
  simulate->add_option("--checkpoint-ops", sim.checkpoint_ops,
                       "Comma-separated product operators to project at marks");

  cli::ProcessArgs proc;
  auto* process = app.add_subcommand("process", "Transform a FID into a 2D spectrum");
  process->add_option("--in", proc.in_path, "Input FID file")->required();
  process->add_option("--out", proc.out_path, "Output spectrum file")->required();
  process->add_option("--window", proc.window_t2, "t2 window: none | sine");
  process->add_option("--window1", proc.window_t1, "t1 window: none | sine");
  process->add_option("--zf1", proc.zf1, "F1 zero-fill size (power of two)");
  process->add_option("--zf2", proc.zf2, "F2 zero-fill size (power of two)");
  process->add_option("--ph0-f2", proc.ph0_f2, "F2 zero-order phase, degrees");
  process->add_option("--ph1-f2", proc.ph1_f2, "F2 first-order phase, degrees");
  process->add_option("--ph0-f1", proc.ph0_f1, "F1 zero-order phase, degrees");
  process->add_option("--ph1-f1", proc.ph1_f1, "F1 first-order phase, degrees");
  process->add_flag("--magnitude", proc.magnitude, "Magnitude output instead of the real part");

  cli::PeaksArgs pk;
  auto* peaks = app.add_subcommand("peaks", "Pick and classify multiplets in a spectrum");
  peaks->add_option("--in", pk.in_path, "Input spectrum file")->required();
  peaks->add_option("--out", pk.out_path, "Output TSV (default: stdout)");
  peaks->add_option("--threshold", pk.threshold, "Pick threshold, fraction of the global maximum");
  peaks->add_option("--diag-tol", pk.diag_tol_hz,
                    "Diagonal band half-width, Hz (default: two grid cells)");
  peaks->add_option("--j-window", pk.group_window_hz, "Multiplet grouping window, Hz");

  cli::CompareArgs cmp;
  auto* compare = app.add_subcommand("compare", "Diagonal suppression report for two spectra");
  compare->add_option("--ref", cmp.ref_path, "Reference spectrum (diagonal present)")->required();
  compare->add_option("--test", cmp.test_path, "Test spectrum")->required();
  compare->add_option("--out", cmp.out_path, "Output report (default: stdout)");
  compare->add_option("--diag-tol", cmp.diag_tol_hz, "Diagonal band half-width, Hz");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kExitOk : cli::kExitValidation;
  }

  return cli::guarded(
      [&]() -> int {
        if (*simulate) return cli::cmd_simulate(sim, std::cout, std::cerr);
        if (*process) return cli::cmd_process(proc, std::cout, std::cerr);
        if (*peaks) return cli::cmd_peaks(pk, std::cout, std::cerr);
        return cli::cmd_compare(cmp, std::cout, std::cerr);
      },
      std::cerr);
}

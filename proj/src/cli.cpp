#include "spinecho/cli.hpp"

#include <cctype>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <sstream>
#include <vector>

#include "spinecho/analysis.hpp"
#include "spinecho/errors.hpp"
#include "spinecho/io.hpp"
#include "spinecho/processing.hpp"
#include "spinecho/pulseprog.hpp"
#include "spinecho/sequences.hpp"
#include "spinecho/spinsys.hpp"

namespace spinecho::cli {
namespace {

int points_for(double aq_s, double sw_hz, const char* what) {
  if (aq_s <= 0.0 || sw_hz <= 0.0) {
    throw ValidationError(std::string(what) + ": acquisition time and spectral width must be positive");
  }
  const double n = std::ceil(aq_s * sw_hz - 1e-9);
  if (n < 1.0 || n > 1e7) {
    throw ValidationError(std::string(what) + ": point count out of range");
  }
  return static_cast<int>(n);
}

pulseprog::EventList resolve_sequence(const std::string& name) {
  if (name == "diagfree") return sequences::build_diagonal_free_cosy();
  if (name == "cosy") return sequences::build_conventional_cosy();
  if (name == "inept") return sequences::build_inept_block();
  const bool looks_like_path = name.find('/') != std::string::npos ||
                               (name.size() > 3 && name.compare(name.size() - 3, 3, ".pp") == 0);
  if (!looks_like_path && !std::filesystem::exists(name)) {
    throw ValidationError("unknown sequence '" + name +
                          "' (builtins: diagfree, cosy, inept; or pass a .pp file)");
  }
  return pulseprog::parse(io::read_text(name), name);
}

processing::Quadrature parse_quadrature(const std::string& q) {
  if (q == "states") return processing::Quadrature::States;
  if (q == "echoantiecho") return processing::Quadrature::EchoAntiecho;
  throw ValidationError("unknown quadrature '" + q + "' (states | echoantiecho)");
}

processing::Window parse_window(const std::string& w, const char* what) {
  if (w == "none") return processing::Window::None;
  if (w == "sine") return processing::Window::Sine;
  throw ValidationError(std::string(what) + ": unknown window '" + w + "' (none | sine)");
}

std::vector<std::string> split_ops(const std::string& csv) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : csv) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::vector<std::string> default_checkpoint_ops(const spinsys::SpinSystemSpec& spec) {
  std::vector<std::string> ops;
  for (const auto& p : spec.protons) {
    for (char axis : {'x', 'y', 'z'}) {
      ops.push_back("I" + std::to_string(p.id) + axis);
    }
  }
  for (const auto& c : spec.carbons) {
    if (!c.attached.empty()) {
      ops.push_back("2I" + std::to_string(c.attached.front()) + "zI" + std::to_string(c.id) + "z");
    }
  }
  return ops;
}

std::string format_g(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

void write_checkpoint_tsv(const std::string& path,
                          const std::vector<std::string>& ops,
                          const std::vector<sequences::CheckpointRecord>& records) {
  std::ostringstream os;
  os << "mark\tt1_index\tcomponent\tscan\tisotopomer";
  for (const auto& op : ops) os << '\t' << op;
  os << '\n';
  for (const auto& rec : records) {
    os << rec.label << '\t' << rec.t1_index << '\t' << rec.component << '\t' << rec.scan << '\t'
       << rec.isotopomer;
    for (double v : rec.coefficients) {
      os << '\t' << (std::isnan(v) ? std::string("nan") : format_g(v));
    }
    os << '\n';
  }
  io::write_text(path, os.str());
}

}  // namespace

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ParseError*>(&e) != nullptr) return kExitParse;
  if (dynamic_cast<const ValidationError*>(&e) != nullptr) return kExitValidation;
  if (dynamic_cast<const IoError*>(&e) != nullptr) return kExitIo;
  return kExitUnexpected;
}

int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err) {
  if (args.system_path.empty()) throw ValidationError("--system is required");
  if (args.out_path.empty()) throw ValidationError("--out is required");
  if (args.scans < 1) throw ValidationError("--scans must be >= 1");
  if (args.dummy_scans < 0) throw ValidationError("--dummy-scans must be >= 0");
  if (args.slices < 1) throw ValidationError("--slices must be >= 1");
  if (args.threads < 0) throw ValidationError("--threads must be >= 0");
  if (args.tau_s < 0.0) throw ValidationError("--tau must be >= 0");

  const auto spec = spinsys::parse_spin_system(io::read_text(args.system_path), args.system_path);
  const auto isotopomers = spinsys::enumerate_isotopomers(spec);

  sequences::ExperimentPlan plan;
  plan.seq = resolve_sequence(args.sequence);
  plan.sw1 = args.sw1;
  plan.sw2 = args.sw2;
  plan.n_t1 = points_for(args.aq1, args.sw1, "t1");
  plan.n_t2 = points_for(args.aq2, args.sw2, "t2");
  plan.scans = args.scans;
  plan.dummy_scans = args.dummy_scans;
  plan.recovery_s = args.recovery_s;
  plan.tau_s = args.tau_s;
  plan.quadrature = parse_quadrature(args.quadrature);

  pulseprog::LintOptions lint_opts;
  lint_opts.target_j1ch_hz = spinsys::one_bond_j_hz(spec);
  lint_opts.scans = plan.scans;
  if (plan.tau_s > 0.0) lint_opts.tau_override_s = plan.tau_s;
  for (const auto& diag : pulseprog::lint(plan.seq, lint_opts)) {
    err << "warning: " << diag.str() << "\n";
  }

  sequences::EngineConfig cfg;
  cfg.gradient_mode =
      args.ideal_gradients ? sequences::GradientMode::Exact : sequences::GradientMode::Slices;
  cfg.n_slices = args.slices;
  cfg.exec = args.serial ? sequences::ExecMode::Serial : sequences::ExecMode::Parallel;
  cfg.threads = args.threads;

  sequences::CheckpointRequest request;
  sequences::CheckpointCapture capture;
  const bool want_checkpoints = !args.checkpoints_path.empty();
  if (want_checkpoints) {
    request.operators =
        args.checkpoint_ops.empty() ? default_checkpoint_ops(spec) : split_ops(args.checkpoint_ops);
    if (request.operators.empty()) throw ValidationError("--checkpoint-ops: no operators given");
  }

  const auto t0 = std::chrono::steady_clock::now();
  const auto fid = sequences::run_experiment(plan, isotopomers, cfg,
                                             want_checkpoints ? &request : nullptr,
                                             want_checkpoints ? &capture : nullptr);
  const auto t1 = std::chrono::steady_clock::now();
  const double elapsed = std::chrono::duration<double>(t1 - t0).count();

  io::write_fid(args.out_path, fid);
  if (want_checkpoints) {
    write_checkpoint_tsv(args.checkpoints_path, capture.operators, capture.records);
  }

  out << "wrote " << args.out_path << ": n_t1=" << plan.n_t1 << " n_t2=" << plan.n_t2
      << " scans=" << plan.scans << " isotopomers=" << isotopomers.size()
      << " gradients=" << (args.ideal_gradients ? "exact" : "slices") << " elapsed_s=" << format_g(elapsed)
      << "\n";
  return kExitOk;
}

int cmd_process(const ProcessArgs& args, std::ostream& out, std::ostream& /*err*/) {
  if (args.in_path.empty()) throw ValidationError("--in is required");
  if (args.out_path.empty()) throw ValidationError("--out is required");

  auto fid = io::read_fid(args.in_path);
  processing::apodize(fid, parse_window(args.window_t2, "t2"), parse_window(args.window_t1, "t1"));

  processing::TransformSpec spec;
  spec.zf1 = args.zf1;
  spec.zf2 = args.zf2;
  spec.ph0_f2_deg = args.ph0_f2;
  spec.ph1_f2_deg = args.ph1_f2;
  spec.ph0_f1_deg = args.ph0_f1;
  spec.ph1_f1_deg = args.ph1_f1;
  spec.magnitude = args.magnitude;

  const auto spectrum = processing::transform(fid, spec);
  io::write_spectrum(args.out_path, spectrum);
  out << "wrote " << args.out_path << ": " << spectrum.provenance << "\n";
  return kExitOk;
}

int cmd_peaks(const PeaksArgs& args, std::ostream& out, std::ostream& /*err*/) {
  if (args.in_path.empty()) throw ValidationError("--in is required");
  const auto spectrum = io::read_spectrum(args.in_path);

  analysis::PickOptions opts;
  opts.threshold = args.threshold;
  opts.diag_tol_hz = args.diag_tol_hz > 0.0
                         ? args.diag_tol_hz
                         : 2.0 * std::max(std::abs(spectrum.f1_step), std::abs(spectrum.f2_step));
  opts.group_window_hz = args.group_window_hz;

  const auto table = analysis::pick_peaks(spectrum, opts);
  const auto text = analysis::serialize(table);
  if (args.out_path.empty()) {
    out << text;
  } else {
    io::write_text(args.out_path, text);
    out << "wrote " << args.out_path << ": " << table.peaks.size() << " multiplets\n";
  }
  return kExitOk;
}

int cmd_compare(const CompareArgs& args, std::ostream& out, std::ostream& /*err*/) {
  if (args.ref_path.empty() || args.test_path.empty()) {
    throw ValidationError("--ref and --test are required");
  }
  const auto ref = io::read_spectrum(args.ref_path);
  const auto test = io::read_spectrum(args.test_path);
  const auto report = analysis::compare(ref, test, args.diag_tol_hz);
  const auto text = analysis::serialize(report);
  if (args.out_path.empty()) {
    out << text;
  } else {
    io::write_text(args.out_path, text);
    out << "wrote " << args.out_path << "\n";
  }
  return kExitOk;
}

}  // namespace spinecho::cli

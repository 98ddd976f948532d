#include "spinecho/sequences.hpp"

#include <cmath>
#include <limits>

#include "spinecho/engine.hpp"
#include "spinecho/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace spinecho::sequences {

using engine::cplx;
using engine::Matrix;
using processing::Quadrature;
using pulseprog::Event;
using pulseprog::EventKind;
using pulseprog::EventList;
using pulseprog::GradientEntry;
using pulseprog::kChanC;
using pulseprog::kChanH;
using pulseprog::PhaseTable;

// ---------------------------------------------------------------------------
// Builders.

namespace {

PhaseTable table(std::initializer_list<int> quadrants, bool states = false) {
  PhaseTable t;
  t.quadrants = quadrants;
  t.states_increment = states;
  return t;
}

Event pulse_ev(std::uint8_t channels, double angle_deg, std::string phase) {
  Event e;
  e.kind = EventKind::Pulse;
  e.channels = channels;
  e.angle_deg = angle_deg;
  e.phase = std::move(phase);
  return e;
}

Event delay_tau_ev() {
  Event e;
  e.kind = EventKind::Delay;
  e.delay_is_tau = true;
  return e;
}

Event t1half_ev() {
  Event e;
  e.kind = EventKind::T1Half;
  return e;
}

Event grad_ev(std::string name) {
  Event e;
  e.kind = EventKind::Gradient;
  e.grad = std::move(name);
  return e;
}

Event mark_ev(std::string label) {
  Event e;
  e.kind = EventKind::Mark;
  e.label = std::move(label);
  return e;
}

Event purge_ev() {
  Event e;
  e.kind = EventKind::Purge;
  return e;
}

Event acquire_ev(std::string phase, std::uint8_t decouple_channels) {
  Event e;
  e.kind = EventKind::Acquire;
  e.phase = std::move(phase);
  if (decouple_channels) {
    e.decouple = true;
    e.decouple_channels = decouple_channels;
  }
  return e;
}

}  // namespace

pulseprog::EventList build_diagonal_free_cosy(double tau_s) {
  EventList q;
  q.symbols = {{"tau", tau_s}};
  q.phase_tables = {
      {"ph1", table({0})},
      {"ph2", table({1})},
      {"ph3", table({0, 2})},
      {"ph4", table({1, 1, 1, 1, 3, 3, 3, 3})},
      {"ph5", table({0}, true)},
      {"ph5c", table({0})},
      {"ph6", table({0})},
      {"ph6c", table({0})},
      {"ph7", table({0, 0, 2, 2})},
      {"ph8", table({0})},
      {"phr", table({0, 2, 2, 0, 2, 0, 0, 2})},
      {"ph0", table({0})},
  };
  q.gradients = {
      {"g1", GradientEntry{77, false}}, {"g2", GradientEntry{67, false}},
      {"g3", GradientEntry{80, false}}, {"g4", GradientEntry{51, false}},
      {"g5", GradientEntry{51, false}}, {"g6", GradientEntry{53, false}},
      {"g7", GradientEntry{53, false}}, {"g8", GradientEntry{15, false}},
      {"g9", GradientEntry{15, false}},
  };
  q.echo_pairs = {{"g4", "g5"}, {"g6", "g7"}, {"g8", "g9"}};

  // g1/g2 belong to the purge sandwich before the first pulse; they appear in
  // the ratio table but their effect on fresh z magnetization is a no-op, so
  // the purge event stands in for them.
  q.events = {
      purge_ev(),
      mark_ev("c"),
      pulse_ev(kChanH, 90, "ph1"),
      delay_tau_ev(),
      pulse_ev(kChanH | kChanC, 180, "ph0"),
      delay_tau_ev(),
      mark_ev("d"),
      pulse_ev(kChanH, 90, "ph2"),
      mark_ev("e"),
      grad_ev("g3"),
      pulse_ev(kChanC, 90, "ph3"),
      mark_ev("f"),
      grad_ev("g4"),
      pulse_ev(kChanC, 180, "ph4"),
      grad_ev("g5"),
      mark_ev("h"),
      pulse_ev(kChanH, 90, "ph5"),
      pulse_ev(kChanC, 90, "ph5c"),
      mark_ev("i"),
      delay_tau_ev(),
      pulse_ev(kChanH | kChanC, 180, "ph0"),
      delay_tau_ev(),
      mark_ev("j"),
      t1half_ev(),
      pulse_ev(kChanC, 180, "ph8"),
      t1half_ev(),
      mark_ev("k"),
      grad_ev("g8"),
      grad_ev("g6"),
      pulse_ev(kChanH, 180, "ph0"),
      grad_ev("g7"),
      mark_ev("l"),
      mark_ev("m"),
      pulse_ev(kChanH, 90, "ph6"),
      pulse_ev(kChanC, 90, "ph6c"),
      mark_ev("o"),
      delay_tau_ev(),
      pulse_ev(kChanH | kChanC, 180, "ph0"),
      delay_tau_ev(),
      grad_ev("g9"),
      mark_ev("p"),
      pulse_ev(kChanC, 90, "ph7"),
      mark_ev("q"),
      acquire_ev("phr", kChanC),
  };
  return q;
}

pulseprog::EventList build_conventional_cosy() {
  EventList q;
  q.phase_tables = {
      {"ph1", table({0})},
      {"ph2", table({0})},
      {"phr", table({0})},
  };
  q.gradients = {
      {"gt1", GradientEntry{40, true}},
      {"gt2", GradientEntry{40, false}},
  };
  q.events = {
      purge_ev(),
      mark_ev("a"),
      pulse_ev(kChanH, 90, "ph1"),
      t1half_ev(),
      t1half_ev(),
      grad_ev("gt1"),
      pulse_ev(kChanH, 90, "ph2"),
      grad_ev("gt2"),
      acquire_ev("phr", 0),
  };
  return q;
}

pulseprog::EventList build_inept_block(double tau_s) {
  EventList q;
  q.symbols = {{"tau", tau_s}};
  q.phase_tables = {
      {"ph1", table({0})},
      {"ph2", table({1})},
      {"ph3", table({0})},
      {"ph0", table({0})},
      {"phr", table({0})},
  };
  q.events = {
      purge_ev(),
      mark_ev("c"),
      pulse_ev(kChanH, 90, "ph1"),
      delay_tau_ev(),
      pulse_ev(kChanH | kChanC, 180, "ph0"),
      delay_tau_ev(),
      mark_ev("d"),
      pulse_ev(kChanH, 90, "ph2"),
      mark_ev("e"),
      pulse_ev(kChanH, 90, "ph3"),
      mark_ev("f"),
      delay_tau_ev(),
      pulse_ev(kChanH | kChanC, 180, "ph0"),
      delay_tau_ev(),
      mark_ev("g"),
      acquire_ev("phr", kChanC),
  };
  return q;
}

// ---------------------------------------------------------------------------
// Driver internals.

namespace {

struct IsoContext {
  std::string name;
  double weight = 1.0;
  engine::OperatorBasis basis;
  engine::Hamiltonian h_t1;     // full couplings: t1 evolution
  engine::Hamiltonian h_delay;  // fixed delays (homonuclear optionally suspended)
  engine::Hamiltonian h_acq;    // acquisition, with the event's decoupling
  Matrix eq_full;
  Matrix eq_protons;
  std::vector<Matrix> cap_ops;
  std::vector<bool> cap_present;

  explicit IsoContext(const spinsys::Isotopomer& iso) : basis(iso.spins) {}
};

struct RunSetup {
  const ExperimentPlan* plan = nullptr;
  const EngineConfig* cfg = nullptr;
  double tau = 0.0;
  double dwell1 = 0.0, dwell2 = 0.0;
  std::vector<IsoContext> isos;
  bool capture = false;
  std::vector<std::string> cap_names;
};

int phase_quadrant(const PhaseTable& t, int scan, int comp, Quadrature quad) {
  int q = t.quadrants[scan % t.quadrants.size()];
  if (quad == Quadrature::States && comp == 1 && t.states_increment)
    q = (q + 1) % 4;
  return q;
}

// The per-job propagation state under either gradient model.
struct PropState {
  bool exact = false;
  int dim = 0;
  std::vector<Matrix> slices;
  std::vector<double> zpos;
  engine::WindingEnsemble winding;

  void reset(const Matrix& rho) {
    if (exact) {
      winding.parts.clear();
      winding.parts[engine::WindingKey{0, 0}] = rho;
    } else {
      for (auto& s : slices) s = rho;
    }
  }

  template <class F>
  void for_each(F&& f) {
    if (exact)
      for (auto& [key, m] : winding.parts) f(m);
    else
      for (auto& s : slices) f(s);
  }

  // What a checkpoint observes: the coherent state before any dephasing is
  // resolved (winding sum) or the ensemble average over slice positions.
  Matrix checkpoint_matrix() const {
    if (exact) return engine::winding_sum(winding, dim);
    Matrix m = Matrix::Zero(dim, dim);
    for (const auto& s : slices) m += s;
    return m / static_cast<double>(slices.size());
  }

  // What acquisition observes: only fully refocused magnetization survives.
  Matrix acquisition_matrix() const {
    if (exact) return engine::winding_refocused(winding, dim);
    Matrix m = Matrix::Zero(dim, dim);
    for (const auto& s : slices) m += s;
    return m / static_cast<double>(slices.size());
  }
};

struct JobOut {
  std::vector<cplx> series;
  std::vector<CheckpointRecord> records;
};

JobOut run_job(const RunSetup& su, const IsoContext& ic, int k1, int comp,
               int scan, int iso_idx) {
  const EventList& seq = su.plan->seq;
  const double t1 = k1 * su.dwell1;

  PropState st;
  st.dim = ic.basis.dim();
  st.exact = su.cfg->gradient_mode == GradientMode::Exact;
  if (!st.exact) {
    st.slices.assign(su.cfg->n_slices, Matrix());
    st.zpos = engine::slice_positions(su.cfg->n_slices);
  }
  st.reset(ic.eq_full);

  JobOut out;
  for (const Event& e : seq.events) {
    switch (e.kind) {
      case EventKind::Purge:
        st.reset(ic.eq_protons);
        break;
      case EventKind::Pulse: {
        const PhaseTable* t = seq.find_phase(e.phase);
        const int q = phase_quadrant(*t, scan, comp, su.plan->quadrature);
        const Matrix u = engine::pulse_operator(
            ic.basis, e.channels & kChanH, e.channels & kChanC,
            e.angle_deg * M_PI / 180.0, q * M_PI / 2.0);
        st.for_each([&](Matrix& m) { engine::apply_unitary(m, u); });
        break;
      }
      case EventKind::Delay: {
        const double d = e.delay_is_tau ? su.tau : e.delay_s;
        st.for_each([&](Matrix& m) { engine::evolve(m, ic.h_delay, d); });
        break;
      }
      case EventKind::T1Half:
        st.for_each([&](Matrix& m) { engine::evolve(m, ic.h_t1, 0.5 * t1); });
        break;
      case EventKind::Gradient: {
        const GradientEntry* g = seq.find_gradient(e.grad);
        double area = g->relative_area;
        if (su.plan->quadrature == Quadrature::EchoAntiecho && comp == 1 &&
            g->antiecho_flip)
          area = -area;
        if (st.exact) {
          engine::apply_gradient_exact(st.winding, ic.basis, area);
        } else {
          engine::GradientSpec gs;
          gs.relative_area = area;
          gs.n_slices = su.cfg->n_slices;
          gs.phase_per_unit = su.cfg->grad_phase_per_unit;
          for (size_t i = 0; i < st.slices.size(); ++i)
            engine::apply_gradient_slice(st.slices[i], ic.basis, gs, st.zpos[i]);
        }
        break;
      }
      case EventKind::Mark: {
        if (!su.capture) break;
        const Matrix m = st.checkpoint_matrix();
        CheckpointRecord rec;
        rec.label = e.label;
        rec.t1_index = k1;
        rec.component = comp;
        rec.scan = scan;
        rec.isotopomer = iso_idx;
        rec.coefficients.resize(su.cap_names.size());
        for (size_t i = 0; i < su.cap_names.size(); ++i)
          rec.coefficients[i] =
              ic.cap_present[i]
                  ? engine::project(m, ic.cap_ops[i])
                  : std::numeric_limits<double>::quiet_NaN();
        out.records.push_back(std::move(rec));
        break;
      }
      case EventKind::Acquire: {
        const PhaseTable* t = seq.find_phase(e.phase);
        // Receiver phase: straight table lookup, never quadrature-incremented.
        const int q = t->quadrants[scan % t->quadrants.size()];
        out.series = engine::acquire(st.acquisition_matrix(), ic.basis, ic.h_acq,
                                     su.plan->n_t2, su.dwell2, q);
        break;
      }
    }
  }
  return out;
}

RunSetup prepare(const ExperimentPlan& plan,
                 const std::vector<spinsys::Isotopomer>& isotopomers,
                 const EngineConfig& cfg, const CheckpointRequest* request) {
  if (plan.n_t1 < 1 || plan.n_t2 < 1)
    throw ValidationError("plan needs at least one point in each dimension");
  if (!(plan.sw1 > 0.0) || !(plan.sw2 > 0.0))
    throw ValidationError("spectral widths must be positive");
  if (plan.scans < 1) throw ValidationError("scans must be >= 1");
  if (plan.dummy_scans < 0 || plan.recovery_s < 0.0)
    throw ValidationError("dummy scans and recovery must be non-negative");
  if (isotopomers.empty()) throw ValidationError("no isotopomers to simulate");
  if (cfg.gradient_mode == GradientMode::Slices && cfg.n_slices < 1)
    throw ValidationError("slice count must be >= 1");

  const EventList& seq = plan.seq;
  int acquires = 0;
  for (const Event& e : seq.events)
    if (e.kind == EventKind::Acquire) ++acquires;
  if (acquires != 1 || seq.events.empty() ||
      seq.events.back().kind != EventKind::Acquire)
    throw ValidationError("sequence must end with its single acquire event");

  if (plan.quadrature == Quadrature::States) {
    bool any = false;
    for (const auto& [name, t] : seq.phase_tables) any = any || t.states_increment;
    if (!any)
      throw ValidationError(
          "hypercomplex acquisition needs a phase table marked 'states'");
  } else {
    bool any = false;
    for (const auto& [name, g] : seq.gradients) any = any || g.antiecho_flip;
    if (!any)
      throw ValidationError(
          "echo-antiecho acquisition needs a gradient marked 'antiecho'");
  }

  RunSetup su;
  su.plan = &plan;
  su.cfg = &cfg;
  su.tau = resolve_tau(plan, isotopomers);
  su.dwell1 = 1.0 / plan.sw1;
  su.dwell2 = 1.0 / plan.sw2;
  su.capture = request != nullptr;
  if (request) {
    if (request->operators.empty())
      throw ValidationError("checkpoint request lists no operators");
    su.cap_names = request->operators;
  }

  const Event& acq = seq.events.back();
  for (const auto& iso : isotopomers) {
    IsoContext ic(iso);
    ic.name = iso.name;
    ic.weight = iso.weight;

    engine::HamiltonianOptions free_opt;
    ic.h_t1 = engine::build_hamiltonian(ic.basis, iso.couplings, free_opt);

    engine::HamiltonianOptions delay_opt;
    delay_opt.include_homonuclear = cfg.homonuclear_in_fixed_delays;
    ic.h_delay = engine::build_hamiltonian(ic.basis, iso.couplings, delay_opt);

    engine::HamiltonianOptions acq_opt;
    if (acq.decouple) {
      if (acq.decouple_channels & kChanC) acq_opt.decouple_ch = true;
      if (acq.decouple_channels & kChanH) acq_opt.include_homonuclear = false;
    }
    ic.h_acq = engine::build_hamiltonian(ic.basis, iso.couplings, acq_opt);

    ic.eq_full = engine::equilibrium(ic.basis, false);
    ic.eq_protons = engine::equilibrium(ic.basis, true);

    for (const auto& expr : su.cap_names) {
      bool present = true;
      ic.cap_ops.push_back(engine::parse_product_operator(ic.basis, expr, &present));
      ic.cap_present.push_back(present);
    }
    su.isos.push_back(std::move(ic));
  }
  return su;
}

processing::Fid2D make_fid(const ExperimentPlan& plan) {
  processing::Fid2D fid;
  fid.n_t1 = plan.n_t1;
  fid.components = 2;
  fid.n_t2 = plan.n_t2;
  fid.sw1 = plan.sw1;
  fid.sw2 = plan.sw2;
  fid.quadrature = plan.quadrature;
  fid.resize();
  return fid;
}

}  // namespace

double resolve_tau(const ExperimentPlan& plan,
                   const std::vector<spinsys::Isotopomer>& isotopomers) {
  if (plan.tau_s > 0.0) return plan.tau_s;
  if (auto v = plan.seq.find_symbol("tau")) return *v;

  bool needs_tau = false;
  for (const Event& e : plan.seq.events)
    if (e.kind == EventKind::Delay && e.delay_is_tau) needs_tau = true;
  if (!needs_tau) return 0.0;

  // Tune the editing interval so 2*tau = 1/(2 j1ch).
  for (const auto& iso : isotopomers)
    for (const auto& c : iso.couplings)
      if (c.kind == spinsys::CouplingKind::OneBond && c.j_hz > 0.0)
        return 1.0 / (4.0 * c.j_hz);
  throw ValidationError(
      "tau is not set and the spin system has no one-bond coupling to derive it");
}

processing::Fid2D run_experiment(const ExperimentPlan& plan,
                                 const std::vector<spinsys::Isotopomer>& isotopomers,
                                 const EngineConfig& cfg,
                                 const CheckpointRequest* request,
                                 CheckpointCapture* capture) {
  if (cfg.exec == ExecMode::Serial)
    return run_experiment_reference(plan, isotopomers, cfg, request, capture);

  const RunSetup su = prepare(plan, isotopomers, cfg, request);
  processing::Fid2D fid = make_fid(plan);

  const int rows = plan.n_t1 * 2;
  std::vector<std::vector<cplx>> rowdata(rows);
  std::vector<std::vector<CheckpointRecord>> rowrecs(rows);

#ifdef _OPENMP
  const int nt = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nt)
#endif
  for (int r = 0; r < rows; ++r) {
    const int k1 = r / 2;
    const int comp = r % 2;
    std::vector<cplx> acc(plan.n_t2, cplx{});
    for (int scan = 0; scan < plan.scans; ++scan) {
      for (size_t iso = 0; iso < su.isos.size(); ++iso) {
        JobOut jo = run_job(su, su.isos[iso], k1, comp, scan,
                            static_cast<int>(iso));
        const double w = su.isos[iso].weight / plan.scans;
        for (int k2 = 0; k2 < plan.n_t2; ++k2) acc[k2] += w * jo.series[k2];
        for (auto& rec : jo.records) rowrecs[r].push_back(std::move(rec));
      }
    }
    rowdata[r] = std::move(acc);
  }

  // Fixed-order reduction: assembly order is independent of thread count, so
  // the output is bit-identical to the serial reference.
  for (int r = 0; r < rows; ++r)
    for (int k2 = 0; k2 < plan.n_t2; ++k2)
      fid.at(r / 2, r % 2, k2) = rowdata[r][k2];

  if (capture) {
    capture->operators = su.cap_names;
    capture->records.clear();
    for (int r = 0; r < rows; ++r)
      for (auto& rec : rowrecs[r]) capture->records.push_back(std::move(rec));
  }
  return fid;
}

processing::Fid2D run_experiment_reference(
    const ExperimentPlan& plan, const std::vector<spinsys::Isotopomer>& isotopomers,
    const EngineConfig& cfg, const CheckpointRequest* request,
    CheckpointCapture* capture) {
  const RunSetup su = prepare(plan, isotopomers, cfg, request);
  processing::Fid2D fid = make_fid(plan);
  if (capture) {
    capture->operators = su.cap_names;
    capture->records.clear();
  }

  for (int k1 = 0; k1 < plan.n_t1; ++k1) {
    for (int comp = 0; comp < 2; ++comp) {
      for (int scan = 0; scan < plan.scans; ++scan) {
        for (size_t iso = 0; iso < su.isos.size(); ++iso) {
          JobOut jo = run_job(su, su.isos[iso], k1, comp, scan,
                              static_cast<int>(iso));
          const double w = su.isos[iso].weight / plan.scans;
          for (int k2 = 0; k2 < plan.n_t2; ++k2)
            fid.at(k1, comp, k2) += w * jo.series[k2];
          if (capture)
            for (auto& rec : jo.records)
              capture->records.push_back(std::move(rec));
        }
      }
    }
  }
  return fid;
}

}  // namespace spinecho::sequences

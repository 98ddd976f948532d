#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace spinecho::pulseprog {

// Channel bitmask for pulse and decouple statements.
inline constexpr std::uint8_t kChanH = 1;
inline constexpr std::uint8_t kChanC = 2;

enum class EventKind { Pulse, Delay, Gradient, T1Half, Acquire, Mark, Purge };

struct Event {
  EventKind kind = EventKind::Mark;
  int line = 0;

  // Pulse: channels, flip angle, phase table name.
  std::uint8_t channels = 0;
  double angle_deg = 0.0;
  std::string phase;  // also the receiver table for Acquire

  // Delay: a literal duration or the symbol "tau".
  bool delay_is_tau = false;
  double delay_s = 0.0;

  // Gradient reference.
  std::string grad;

  // Acquire options.
  bool decouple = false;
  std::uint8_t decouple_channels = 0;

  // Mark label.
  std::string label;

  // Source line is diagnostic metadata, not identity: a program built in code
  // and the same program parsed from a file compare equal.
  bool operator==(const Event& o) const {
    return kind == o.kind && channels == o.channels && angle_deg == o.angle_deg &&
           phase == o.phase && delay_is_tau == o.delay_is_tau && delay_s == o.delay_s &&
           grad == o.grad && decouple == o.decouple && decouple_channels == o.decouple_channels &&
           label == o.label;
  }
};

struct PhaseTable {
  std::vector<int> quadrants;  // each 0..3, meaning x,y,-x,-y
  // The indirect-dimension quadrature component advances this table by one
  // quadrant (the hypercomplex interleave).
  bool states_increment = false;

  bool operator==(const PhaseTable&) const = default;
};

struct GradientEntry {
  double relative_area = 0.0;
  // Echo/antiecho selection alternates this gradient's sign on the second
  // quadrature component.
  bool antiecho_flip = false;

  bool operator==(const GradientEntry&) const = default;
};

struct EventList {
  // Declaration-ordered tables.
  std::vector<std::pair<std::string, double>> symbols;
  std::vector<std::pair<std::string, PhaseTable>> phase_tables;
  std::vector<std::pair<std::string, GradientEntry>> gradients;
  std::vector<std::pair<std::string, std::string>> echo_pairs;
  std::vector<Event> events;

  const PhaseTable* find_phase(const std::string& name) const;
  const GradientEntry* find_gradient(const std::string& name) const;
  std::optional<double> find_symbol(const std::string& name) const;

  bool operator==(const EventList&) const = default;
};

// Line-oriented grammar; '#' starts a comment. Statements:
//   set NAME = NUMBER
//   phase NAME = Q... [states]        (Q in 0..3)
//   gradient NAME = NUMBER [antiecho]
//   echopair NAME NAME
//   purge
//   pulse CHANNELS ANGLE PHASE        (CHANNELS: H, C or H,C; ANGLE in degrees)
//   delay (NUMBER | tau)
//   t1half
//   grad NAME
//   mark LABEL
//   acquire [decouple CHANNELS] PHASE
// Exactly one acquire, and it must be the final event. Throws ParseError.
EventList parse(const std::string& text, const std::string& filename);
EventList load(const std::string& path);

// Canonical text form; parse(serialize(x)) == x.
std::string serialize(const EventList& seq);

// ---------------------------------------------------------------------------
// Lint: non-fatal diagnostics about physically suspect programs.

struct Diagnostic {
  std::string file;
  int line = 0;
  std::string code;  // W001..W003
  std::string message;

  std::string str() const;
};

struct LintOptions {
  // When set, W001 checks that 2*tau matches 1/(2 j1ch) within 5%.
  std::optional<double> target_j1ch_hz;
  // When set, W003 checks that every phase table length divides the scan count.
  std::optional<int> scans;
  // Tau the run will actually use, when it overrides the program symbol.
  std::optional<double> tau_override_s;
};

// W001: editing delay mistuned for the stated one-bond coupling.
// W002: declared echo pair with unbalanced areas.
// W003: phase table longer than the scan cycle it will be truncated to.
std::vector<Diagnostic> lint(const EventList& seq, const LintOptions& opt,
                             const std::string& filename = "");

}  // namespace spinecho::pulseprog

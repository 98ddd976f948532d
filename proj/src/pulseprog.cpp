#include "spinecho/pulseprog.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "spinecho/errors.hpp"

namespace spinecho::pulseprog {

namespace {

struct Token {
  std::string text;
  int col = 0;
};

std::vector<Token> tokenize(const std::string& line) {
  std::vector<Token> out;
  size_t i = 0;
  while (i < line.size()) {
    if (std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])))
      ++j;
    out.push_back({line.substr(i, j - i), static_cast<int>(i) + 1});
    i = j;
  }
  return out;
}

double to_number(const std::string& file, int line, const Token& tok) {
  double v = 0;
  const char* b = tok.text.data();
  const char* e = b + tok.text.size();
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e)
    throw ParseError(file, line, tok.col, "expected a number, got '" + tok.text + "'");
  return v;
}

std::uint8_t to_channels(const std::string& file, int line, const Token& tok) {
  std::uint8_t ch = 0;
  size_t i = 0;
  while (i < tok.text.size()) {
    if (tok.text[i] == 'H')
      ch |= kChanH;
    else if (tok.text[i] == 'C')
      ch |= kChanC;
    else
      throw ParseError(file, line, tok.col,
                       "bad channel list '" + tok.text + "' (use H, C or H,C)");
    ++i;
    if (i < tok.text.size()) {
      if (tok.text[i] != ',')
        throw ParseError(file, line, tok.col,
                         "bad channel list '" + tok.text + "' (use H, C or H,C)");
      ++i;
    }
  }
  if (ch == 0)
    throw ParseError(file, line, tok.col, "empty channel list");
  return ch;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string channels_str(std::uint8_t ch) {
  if (ch == (kChanH | kChanC)) return "H,C";
  return ch == kChanH ? "H" : "C";
}

}  // namespace

const PhaseTable* EventList::find_phase(const std::string& name) const {
  for (const auto& [n, t] : phase_tables)
    if (n == name) return &t;
  return nullptr;
}

const GradientEntry* EventList::find_gradient(const std::string& name) const {
  for (const auto& [n, g] : gradients)
    if (n == name) return &g;
  return nullptr;
}

std::optional<double> EventList::find_symbol(const std::string& name) const {
  for (const auto& [n, v] : symbols)
    if (n == name) return v;
  return std::nullopt;
}

EventList parse(const std::string& text, const std::string& filename) {
  EventList seq;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  int acquire_line = 0;

  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (auto pos = raw.find('#'); pos != std::string::npos) raw.erase(pos);
    auto tok = tokenize(raw);
    if (tok.empty()) continue;

    const std::string& kw = tok[0].text;
    auto need = [&](size_t count, const char* usage) {
      if (tok.size() != count)
        throw ParseError(filename, line_no, tok[0].col,
                         std::string("usage: ") + usage);
    };
    if (acquire_line && kw != "set" && kw != "phase" && kw != "gradient" &&
        kw != "echopair")
      throw ParseError(filename, line_no, tok[0].col,
                       "events after acquire (acquire must be the final event)");

    if (kw == "set") {
      need(4, "set NAME = NUMBER");
      if (tok[2].text != "=")
        throw ParseError(filename, line_no, tok[2].col, "expected '='");
      if (seq.find_symbol(tok[1].text))
        throw ParseError(filename, line_no, tok[1].col,
                         "duplicate symbol '" + tok[1].text + "'");
      seq.symbols.emplace_back(tok[1].text, to_number(filename, line_no, tok[3]));
    } else if (kw == "phase") {
      if (tok.size() < 4 || tok[2].text != "=")
        throw ParseError(filename, line_no, tok[0].col,
                         "usage: phase NAME = Q... [states]");
      if (seq.find_phase(tok[1].text))
        throw ParseError(filename, line_no, tok[1].col,
                         "duplicate phase table '" + tok[1].text + "'");
      PhaseTable table;
      size_t last = tok.size();
      if (tok.back().text == "states") {
        table.states_increment = true;
        --last;
      }
      for (size_t i = 3; i < last; ++i) {
        const double q = to_number(filename, line_no, tok[i]);
        const int qi = static_cast<int>(q);
        if (q != qi || qi < 0 || qi > 3)
          throw ParseError(filename, line_no, tok[i].col,
                           "phase quadrants must be integers 0..3");
        table.quadrants.push_back(qi);
      }
      if (table.quadrants.empty())
        throw ParseError(filename, line_no, tok[0].col, "empty phase table");
      seq.phase_tables.emplace_back(tok[1].text, table);
    } else if (kw == "gradient") {
      if (tok.size() != 4 && !(tok.size() == 5 && tok[4].text == "antiecho"))
        throw ParseError(filename, line_no, tok[0].col,
                         "usage: gradient NAME = NUMBER [antiecho]");
      if (tok[2].text != "=")
        throw ParseError(filename, line_no, tok[2].col, "expected '='");
      if (seq.find_gradient(tok[1].text))
        throw ParseError(filename, line_no, tok[1].col,
                         "duplicate gradient '" + tok[1].text + "'");
      GradientEntry g;
      g.relative_area = to_number(filename, line_no, tok[3]);
      g.antiecho_flip = tok.size() == 5;
      seq.gradients.emplace_back(tok[1].text, g);
    } else if (kw == "echopair") {
      need(3, "echopair NAME NAME");
      for (int i : {1, 2})
        if (!seq.find_gradient(tok[i].text))
          throw ParseError(filename, line_no, tok[i].col,
                           "echopair references undeclared gradient '" +
                               tok[i].text + "'");
      seq.echo_pairs.emplace_back(tok[1].text, tok[2].text);
    } else if (kw == "purge") {
      need(1, "purge");
      Event e;
      e.kind = EventKind::Purge;
      e.line = line_no;
      seq.events.push_back(e);
    } else if (kw == "pulse") {
      need(4, "pulse CHANNELS ANGLE PHASE");
      Event e;
      e.kind = EventKind::Pulse;
      e.line = line_no;
      e.channels = to_channels(filename, line_no, tok[1]);
      e.angle_deg = to_number(filename, line_no, tok[2]);
      if (!(e.angle_deg > 0.0))
        throw ParseError(filename, line_no, tok[2].col, "flip angle must be positive");
      if (!seq.find_phase(tok[3].text))
        throw ParseError(filename, line_no, tok[3].col,
                         "undeclared phase table '" + tok[3].text + "'");
      e.phase = tok[3].text;
      seq.events.push_back(e);
    } else if (kw == "delay") {
      need(2, "delay (NUMBER | tau)");
      Event e;
      e.kind = EventKind::Delay;
      e.line = line_no;
      if (tok[1].text == "tau") {
        e.delay_is_tau = true;
      } else {
        e.delay_s = to_number(filename, line_no, tok[1]);
        if (e.delay_s < 0.0)
          throw ParseError(filename, line_no, tok[1].col, "negative delay");
      }
      seq.events.push_back(e);
    } else if (kw == "t1half") {
      need(1, "t1half");
      Event e;
      e.kind = EventKind::T1Half;
      e.line = line_no;
      seq.events.push_back(e);
    } else if (kw == "grad") {
      need(2, "grad NAME");
      if (!seq.find_gradient(tok[1].text))
        throw ParseError(filename, line_no, tok[1].col,
                         "undeclared gradient '" + tok[1].text + "'");
      Event e;
      e.kind = EventKind::Gradient;
      e.line = line_no;
      e.grad = tok[1].text;
      seq.events.push_back(e);
    } else if (kw == "mark") {
      need(2, "mark LABEL");
      Event e;
      e.kind = EventKind::Mark;
      e.line = line_no;
      e.label = tok[1].text;
      seq.events.push_back(e);
    } else if (kw == "acquire") {
      Event e;
      e.kind = EventKind::Acquire;
      e.line = line_no;
      size_t i = 1;
      if (i < tok.size() && tok[i].text == "decouple") {
        if (i + 1 >= tok.size())
          throw ParseError(filename, line_no, tok[i].col,
                           "decouple needs a channel list");
        e.decouple = true;
        e.decouple_channels = to_channels(filename, line_no, tok[i + 1]);
        i += 2;
      }
      if (i + 1 != tok.size())
        throw ParseError(filename, line_no, tok[0].col,
                         "usage: acquire [decouple CHANNELS] PHASE");
      if (!seq.find_phase(tok[i].text))
        throw ParseError(filename, line_no, tok[i].col,
                         "undeclared phase table '" + tok[i].text + "'");
      e.phase = tok[i].text;
      seq.events.push_back(e);
      acquire_line = line_no;
    } else {
      throw ParseError(filename, line_no, tok[0].col,
                       "unknown statement '" + kw + "'");
    }
  }

  if (!acquire_line)
    throw ParseError(filename, line_no ? line_no : 1, 1,
                     "program has no acquire event");
  return seq;
}

EventList load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open pulse program: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

std::string serialize(const EventList& seq) {
  std::ostringstream out;
  for (const auto& [name, value] : seq.symbols)
    out << "set " << name << " = " << format_double(value) << "\n";
  for (const auto& [name, table] : seq.phase_tables) {
    out << "phase " << name << " =";
    for (int q : table.quadrants) out << " " << q;
    if (table.states_increment) out << " states";
    out << "\n";
  }
  for (const auto& [name, g] : seq.gradients) {
    out << "gradient " << name << " = " << format_double(g.relative_area);
    if (g.antiecho_flip) out << " antiecho";
    out << "\n";
  }
  for (const auto& [a, b] : seq.echo_pairs) out << "echopair " << a << " " << b << "\n";
  out << "\n";
  for (const Event& e : seq.events) {
    switch (e.kind) {
      case EventKind::Purge:
        out << "purge\n";
        break;
      case EventKind::Pulse:
        out << "pulse " << channels_str(e.channels) << " "
            << format_double(e.angle_deg) << " " << e.phase << "\n";
        break;
      case EventKind::Delay:
        if (e.delay_is_tau)
          out << "delay tau\n";
        else
          out << "delay " << format_double(e.delay_s) << "\n";
        break;
      case EventKind::T1Half:
        out << "t1half\n";
        break;
      case EventKind::Gradient:
        out << "grad " << e.grad << "\n";
        break;
      case EventKind::Mark:
        out << "mark " << e.label << "\n";
        break;
      case EventKind::Acquire:
        out << "acquire ";
        if (e.decouple) out << "decouple " << channels_str(e.decouple_channels) << " ";
        out << e.phase << "\n";
        break;
    }
  }
  return out.str();
}

std::string Diagnostic::str() const {
  return file + ":" + std::to_string(line) + ": " + code + " " + message;
}

std::vector<Diagnostic> lint(const EventList& seq, const LintOptions& opt,
                             const std::string& filename) {
  std::vector<Diagnostic> out;

  if (opt.target_j1ch_hz && *opt.target_j1ch_hz > 0.0) {
    auto tau = opt.tau_override_s ? opt.tau_override_s : seq.find_symbol("tau");
    if (tau) {
      const double ideal = 1.0 / (2.0 * *opt.target_j1ch_hz);  // the 2*tau interval
      const double actual = 2.0 * *tau;
      if (std::abs(actual - ideal) > 0.05 * ideal) {
        std::ostringstream msg;
        msg << "editing interval 2*tau = " << format_double(actual)
            << " s is mistuned for the one-bond coupling "
            << format_double(*opt.target_j1ch_hz) << " Hz (expected "
            << format_double(ideal) << " s)";
        out.push_back({filename, 1, "W001", msg.str()});
      }
    }
  }

  for (const auto& [a, b] : seq.echo_pairs) {
    const GradientEntry* ga = seq.find_gradient(a);
    const GradientEntry* gb = seq.find_gradient(b);
    if (!ga || !gb) continue;  // parse already rejects this
    if (std::abs(std::abs(ga->relative_area) - std::abs(gb->relative_area)) >
        1e-12 * std::max(1.0, std::abs(ga->relative_area)))
      out.push_back({filename, 1, "W002",
                     "echo pair " + a + "/" + b + " has unbalanced areas " +
                         format_double(ga->relative_area) + " vs " +
                         format_double(gb->relative_area)});
  }

  if (opt.scans && *opt.scans > 0) {
    for (const auto& [name, table] : seq.phase_tables) {
      const int len = static_cast<int>(table.quadrants.size());
      if (*opt.scans % len != 0)
        out.push_back({filename, 1, "W003",
                       "phase table " + name + " has " + std::to_string(len) +
                           " entries, not a divisor of " +
                           std::to_string(*opt.scans) +
                           " scans (cycle truncated)"});
    }
  }
  return out;
}

}  // namespace spinecho::pulseprog

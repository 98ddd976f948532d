#include "spinecho/spinsys.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "spinecho/errors.hpp"

namespace spinecho::spinsys {

namespace {

struct Line {
  int number = 0;
  std::string text;  // comment-stripped, trailing CR removed
};

std::vector<Line> split_lines(const std::string& text) {
  std::vector<Line> out;
  std::istringstream in(text);
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (auto pos = raw.find('#'); pos != std::string::npos) raw.erase(pos);
    out.push_back({number, raw});
  }
  return out;
}

struct Token {
  std::string text;
  int col = 0;  // 1-based
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

double parse_number(const std::string& file, int line, const Token& tok) {
  double value = 0;
  const char* begin = tok.text.data();
  const char* end = begin + tok.text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw ParseError(file, line, tok.col, "expected a number, got '" + tok.text + "'");
  return value;
}

int parse_id(const std::string& file, int line, const Token& tok) {
  int value = 0;
  const char* begin = tok.text.data();
  const char* end = begin + tok.text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || value <= 0)
    throw ParseError(file, line, tok.col,
                     "expected a positive integer spin id, got '" + tok.text + "'");
  return value;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

void validate(const SpinSystemSpec& spec) {
  if (spec.protons.empty())
    throw ValidationError("spin system has no protons");
  if (!(spec.abundance > 0.0) || !(spec.abundance < 1.0))
    throw ValidationError("abundance must lie strictly between 0 and 1");

  std::set<int> ids;
  for (const auto& p : spec.protons)
    if (!ids.insert(p.id).second)
      throw ValidationError("duplicate spin id " + std::to_string(p.id));
  for (const auto& c : spec.carbons)
    if (!ids.insert(c.id).second)
      throw ValidationError("duplicate spin id " + std::to_string(c.id));

  std::set<int> proton_ids;
  for (const auto& p : spec.protons) proton_ids.insert(p.id);

  std::set<int> already_attached;
  for (const auto& c : spec.carbons) {
    if (c.attached.empty())
      throw ValidationError("carbon " + std::to_string(c.id) + " has no attached protons");
    if (!(c.j1ch_hz > 0.0))
      throw ValidationError("carbon " + std::to_string(c.id) +
                            " needs a positive one-bond coupling");
    for (int a : c.attached) {
      if (!proton_ids.count(a))
        throw ValidationError("carbon " + std::to_string(c.id) +
                              " attached to unknown proton " + std::to_string(a));
      if (!already_attached.insert(a).second)
        throw ValidationError("proton " + std::to_string(a) +
                              " attached to more than one carbon");
    }
  }

  std::set<std::pair<int, int>> seen_pairs;
  for (const auto& j : spec.jhh) {
    if (j.a == j.b)
      throw ValidationError("proton-proton coupling of spin " + std::to_string(j.a) +
                            " with itself");
    if (!proton_ids.count(j.a) || !proton_ids.count(j.b))
      throw ValidationError("proton-proton coupling references unknown spin " +
                            std::to_string(proton_ids.count(j.a) ? j.b : j.a));
    auto key = std::minmax(j.a, j.b);
    if (!seen_pairs.insert(key).second)
      throw ValidationError("duplicate proton-proton coupling " + std::to_string(j.a) +
                            "-" + std::to_string(j.b));
  }
}

SpinSystemSpec parse_spin_system(const std::string& text, const std::string& filename) {
  SpinSystemSpec spec;
  spec.abundance = 0.011;

  enum class Section { None, Proton, Carbon, Jhh };
  Section section = Section::None;
  Spin* current_proton = nullptr;
  CarbonSite* current_carbon = nullptr;

  for (const Line& line : split_lines(text)) {
    auto tokens = tokenize(line.text);
    if (tokens.empty()) continue;

    const Token& head = tokens.front();
    if (head.text.front() == '[') {
      // Section header: "[proton N]", "[carbon N]" or "[jhh]".
      std::string joined;
      for (const auto& t : tokens) {
        if (!joined.empty()) joined += ' ';
        joined += t.text;
      }
      if (joined.front() != '[' || joined.back() != ']')
        throw ParseError(filename, line.number, head.col, "malformed section header");
      auto inner = tokenize(joined.substr(1, joined.size() - 2));
      current_proton = nullptr;
      current_carbon = nullptr;
      if (inner.size() == 1 && inner[0].text == "jhh") {
        section = Section::Jhh;
      } else if (inner.size() == 2 && inner[0].text == "proton") {
        Token id_tok{inner[1].text, head.col};
        spec.protons.push_back({parse_id(filename, line.number, id_tok), Channel::H1, 0.0, ""});
        current_proton = &spec.protons.back();
        section = Section::Proton;
      } else if (inner.size() == 2 && inner[0].text == "carbon") {
        Token id_tok{inner[1].text, head.col};
        spec.carbons.push_back({parse_id(filename, line.number, id_tok), {}, 0.0, 0.0, ""});
        current_carbon = &spec.carbons.back();
        section = Section::Carbon;
      } else {
        throw ParseError(filename, line.number, head.col,
                         "unknown section '" + joined + "'");
      }
      continue;
    }

    if (section == Section::Jhh) {
      if (tokens.size() != 3)
        throw ParseError(filename, line.number, head.col,
                         "coupling rows take exactly: <id> <id> <j_hz>");
      Coupling c;
      c.a = parse_id(filename, line.number, tokens[0]);
      c.b = parse_id(filename, line.number, tokens[1]);
      c.j_hz = parse_number(filename, line.number, tokens[2]);
      c.kind = CouplingKind::Homonuclear;
      spec.jhh.push_back(c);
      continue;
    }

    // Key/value rows: "key = value..." at top level or inside a spin section.
    if (tokens.size() < 3 || tokens[1].text != "=")
      throw ParseError(filename, line.number, head.col,
                       "expected 'key = value', got '" + head.text + " ...'");
    const std::string& key = head.text;

    if (section == Section::None) {
      if (key == "abundance") {
        spec.abundance = parse_number(filename, line.number, tokens[2]);
        continue;
      }
      throw ParseError(filename, line.number, head.col,
                       "unknown top-level key '" + key + "'");
    }

    if (section == Section::Proton) {
      if (key == "shift_hz")
        current_proton->shift_hz = parse_number(filename, line.number, tokens[2]);
      else if (key == "label")
        current_proton->label = tokens[2].text;
      else
        throw ParseError(filename, line.number, head.col,
                         "unknown proton key '" + key + "'");
      continue;
    }

    // Section::Carbon
    if (key == "attached") {
      for (size_t i = 2; i < tokens.size(); ++i)
        current_carbon->attached.push_back(parse_id(filename, line.number, tokens[i]));
    } else if (key == "j1ch_hz") {
      current_carbon->j1ch_hz = parse_number(filename, line.number, tokens[2]);
    } else if (key == "shift_hz") {
      current_carbon->shift_hz = parse_number(filename, line.number, tokens[2]);
    } else if (key == "label") {
      current_carbon->label = tokens[2].text;
    } else {
      throw ParseError(filename, line.number, head.col,
                       "unknown carbon key '" + key + "'");
    }
  }

  validate(spec);
  return spec;
}

SpinSystemSpec load_spin_system(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open spin system file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_spin_system(buf.str(), path);
}

std::string serialize(const SpinSystemSpec& spec) {
  std::ostringstream out;
  out << "abundance = " << format_double(spec.abundance) << "\n";
  for (const auto& p : spec.protons) {
    out << "\n[proton " << p.id << "]\n";
    out << "shift_hz = " << format_double(p.shift_hz) << "\n";
    if (!p.label.empty()) out << "label = " << p.label << "\n";
  }
  for (const auto& c : spec.carbons) {
    out << "\n[carbon " << c.id << "]\n";
    out << "attached =";
    for (int a : c.attached) out << " " << a;
    out << "\n";
    out << "j1ch_hz = " << format_double(c.j1ch_hz) << "\n";
    if (c.shift_hz != 0.0) out << "shift_hz = " << format_double(c.shift_hz) << "\n";
    if (!c.label.empty()) out << "label = " << c.label << "\n";
  }
  if (!spec.jhh.empty()) {
    out << "\n[jhh]\n";
    for (const auto& j : spec.jhh)
      out << j.a << " " << j.b << " " << format_double(j.j_hz) << "\n";
  }
  return out.str();
}

std::vector<Isotopomer> enumerate_isotopomers(const SpinSystemSpec& spec) {
  validate(spec);
  const double a = spec.abundance;
  const int k = static_cast<int>(spec.carbons.size());

  std::vector<Isotopomer> out;

  Isotopomer base;
  base.name = "unlabeled";
  base.weight = std::pow(1.0 - a, k);
  base.spins = spec.protons;
  for (const auto& j : spec.jhh) base.couplings.push_back(j);
  out.push_back(base);

  for (const auto& site : spec.carbons) {
    Isotopomer iso;
    iso.name = "13C@" + std::to_string(site.id);
    iso.weight = a * std::pow(1.0 - a, k - 1);
    iso.spins = spec.protons;
    Spin carbon;
    carbon.id = site.id;
    carbon.channel = Channel::C13;
    carbon.shift_hz = site.shift_hz;
    carbon.label = site.label;
    iso.spins.push_back(carbon);
    for (const auto& j : spec.jhh) iso.couplings.push_back(j);
    for (int p : site.attached)
      iso.couplings.push_back({p, site.id, site.j1ch_hz, CouplingKind::OneBond});
    out.push_back(iso);
  }
  return out;
}

double one_bond_j_hz(const SpinSystemSpec& spec) {
  return spec.carbons.empty() ? 0.0 : spec.carbons.front().j1ch_hz;
}

}  // namespace spinecho::spinsys

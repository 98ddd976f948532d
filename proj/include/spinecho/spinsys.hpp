#pragma once

#include <string>
#include <vector>

namespace spinecho::spinsys {

enum class Channel { H1, C13 };

struct Spin {
  int id = 0;
  Channel channel = Channel::H1;
  double shift_hz = 0.0;  // rotating-frame offset
  std::string label;

  bool operator==(const Spin&) const = default;
};

enum class CouplingKind { Homonuclear, OneBond };

struct Coupling {
  int a = 0;
  int b = 0;
  double j_hz = 0.0;
  CouplingKind kind = CouplingKind::Homonuclear;

  bool operator==(const Coupling&) const = default;
};

// One carbon position: its id, the protons bonded to it, and the one-bond
// coupling they acquire when the position carries the magnetic isotope.
struct CarbonSite {
  int id = 0;
  std::vector<int> attached;
  double j1ch_hz = 0.0;
  double shift_hz = 0.0;
  std::string label;

  bool operator==(const CarbonSite&) const = default;
};

struct SpinSystemSpec {
  std::vector<Spin> protons;
  std::vector<CarbonSite> carbons;
  std::vector<Coupling> jhh;
  double abundance = 0.011;  // fractional abundance of the labeled carbon isotope

  bool operator==(const SpinSystemSpec&) const = default;
};

// A concrete labeling state: which spins exist and how they couple.
struct Isotopomer {
  std::string name;
  double weight = 1.0;
  std::vector<Spin> spins;
  std::vector<Coupling> couplings;
};

// Throws ValidationError on broken invariants (duplicate ids, dangling
// coupling references, abundance outside (0,1), ...).
void validate(const SpinSystemSpec& spec);

// Throws ParseError with file/line/col on malformed input; validates before
// returning.
SpinSystemSpec parse_spin_system(const std::string& text, const std::string& filename);
SpinSystemSpec load_spin_system(const std::string& path);

// Canonical text form; parse_spin_system(serialize(s)) reproduces s exactly.
std::string serialize(const SpinSystemSpec& spec);

// The all-unlabeled species plus one singly-labeled species per carbon site,
// in declaration order. Multiply-labeled species (weight O(abundance^2)) are
// dropped. Weights: (1-a)^k for the unlabeled species, a*(1-a)^(k-1) per
// labeled site, with k the number of carbon sites.
std::vector<Isotopomer> enumerate_isotopomers(const SpinSystemSpec& spec);

// One-bond coupling of the first carbon site; 0 when there are no sites.
double one_bond_j_hz(const SpinSystemSpec& spec);

}  // namespace spinecho::spinsys

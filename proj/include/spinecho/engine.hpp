#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <string_view>
#include <vector>

#include "spinecho/spinsys.hpp"

namespace spinecho::engine {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

// Gyromagnetic ratio of the carbon channel relative to the proton channel;
// it scales the z-rotation a gradient of given area imparts per coherence order.
inline constexpr double kGammaRelH = 1.0;
inline constexpr double kGammaRelC = 0.25144;

// Product basis over one isotopomer's spins. Basis state index s encodes spin
// k (in construction order) in bit (n-1-k): bit value 0 is m=+1/2, 1 is
// m=-1/2. Single-spin operators are Kronecker-embedded spin-1/2 matrices.
class OperatorBasis {
public:
  explicit OperatorBasis(std::vector<spinsys::Spin> spins);

  int n_spins() const { return static_cast<int>(spins_.size()); }
  int dim() const { return dim_; }
  const spinsys::Spin& spin(int idx) const { return spins_[idx]; }
  // Index of a spin id, -1 when the id is absent from this isotopomer.
  int index_of(int spin_id) const;

  // Single-spin operator; axis one of 'x','y','z','p','m'.
  const Matrix& op(int idx, char axis) const;
  // Sum of single-spin operators over one channel (zero matrix if the channel
  // is empty).
  Matrix channel_sum(spinsys::Channel ch, char axis) const;

  // Twice the z quantum number of each basis state, summed per channel.
  const std::vector<int>& twice_mz_h() const { return mz2_h_; }
  const std::vector<int>& twice_mz_c() const { return mz2_c_; }

private:
  std::vector<spinsys::Spin> spins_;
  int dim_ = 1;
  std::vector<std::array<Matrix, 5>> ops_;  // x,y,z,p,m per spin
  std::vector<int> mz2_h_, mz2_c_;
};

struct HamiltonianOptions {
  bool include_homonuclear = true;      // proton-proton couplings
  bool decouple_ch = false;             // drop one-bond couplings (acquisition decoupling)
  bool isotropic_homonuclear = false;   // add flip-flop terms for proton pairs
};

// Free-evolution Hamiltonian in rad/s. The secular form is diagonal in the
// product basis; the isotropic homonuclear option makes it dense Hermitian.
struct Hamiltonian {
  bool diagonal = true;
  Eigen::VectorXd diag;
  Matrix dense;
};

Hamiltonian build_hamiltonian(const OperatorBasis& basis,
                              const std::vector<spinsys::Coupling>& couplings,
                              const HamiltonianOptions& opt = {});

// Thermal-equilibrium density operator deviation: sum of Iz over protons
// (plus gamma-weighted carbon Iz unless protons_only).
Matrix equilibrium(const OperatorBasis& basis, bool protons_only);

// U = exp(-i*angle*(cos(phase) Fx + sin(phase) Fy)) with F summed over the
// selected channels. Phase quadrants 0..3 are x, y, -x, -y; a 90 degree
// quadrant-0 pulse takes Iz to -Iy.
Matrix pulse_operator(const OperatorBasis& basis, bool on_h, bool on_c,
                      double angle_rad, double phase_rad);

void apply_unitary(Matrix& rho, const Matrix& u);
void evolve(Matrix& rho, const Hamiltonian& h, double seconds);

// Coefficient of op in rho: Re tr(rho op^H) / tr(op op^H).
double project(const Matrix& rho, const Matrix& op);

// Normalized complex observable sum_{protons} tr(rho (Ix + i Iy)) / 2^(n-2);
// the normalization makes single-spin coefficients dimension-independent so
// isotopomers of different size superpose on a common scale.
cplx detect(const Matrix& rho, const OperatorBasis& basis);

// ---------------------------------------------------------------------------
// Gradients.

struct GradientSpec {
  double relative_area = 0.0;
  int n_slices = 64;
  // z-rotation in radians per unit relative area per unit coherence order for
  // a proton at |z| = 1.
  double phase_per_unit = 3.14159265358979323846;
};

// Midpoints of n equal cells covering [-1, 1].
std::vector<double> slice_positions(int n_slices);

// Gradient action on one slice at height z: per-channel z rotation by
// area*phase_per_unit*z*gamma_rel.
void apply_gradient_slice(Matrix& rho, const OperatorBasis& basis,
                          const GradientSpec& g, double z);

// Exact pathway bookkeeping: the state is split into components indexed by the
// accumulated winding per channel, in integer units of quantized gradient area
// times twice the coherence-order change. Acquisition keeps the (0,0)
// component only - the ideal limit of infinitely strong dephasing.
struct WindingKey {
  std::int64_t h = 0;
  std::int64_t c = 0;
  auto operator<=>(const WindingKey&) const = default;
};

struct WindingEnsemble {
  std::map<WindingKey, Matrix> parts;
};

void apply_gradient_exact(WindingEnsemble& e, const OperatorBasis& basis,
                          double relative_area);
// Coherent sum over all windings (what a checkpoint sees before dephasing).
Matrix winding_sum(const WindingEnsemble& e, int dim);
// The fully refocused component (what acquisition sees).
Matrix winding_refocused(const WindingEnsemble& e, int dim);

// ---------------------------------------------------------------------------
// Product-operator expressions: "I1x", "2I1zI2y", "4I1zI2xI3y",
// "0.5I2z". The leading coefficient is optional (default 1); factors name a
// spin id and an axis. If present != nullptr, a reference to a spin id absent
// from this basis sets *present = false and returns a zero matrix; otherwise
// it throws ParseError.
Matrix parse_product_operator(const OperatorBasis& basis, std::string_view expr,
                              bool* present = nullptr);

// Free-evolution sampling of the proton observable: points samples spaced by
// dwell_s, starting at t = 0, each multiplied by the receiver phase factor
// i^(-quadrant).
std::vector<cplx> acquire(Matrix rho, const OperatorBasis& basis,
                          const Hamiltonian& h, int points, double dwell_s,
                          int receiver_quadrant);

}  // namespace spinecho::engine

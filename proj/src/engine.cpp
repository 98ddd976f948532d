#include "spinecho/engine.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

#include "spinecho/errors.hpp"

namespace spinecho::engine {

namespace {

constexpr cplx kI{0.0, 1.0};

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c)
      out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
  return out;
}

int axis_slot(char axis) {
  switch (axis) {
    case 'x': return 0;
    case 'y': return 1;
    case 'z': return 2;
    case 'p': return 3;
    case 'm': return 4;
  }
  return -1;
}

}  // namespace

OperatorBasis::OperatorBasis(std::vector<spinsys::Spin> spins)
    : spins_(std::move(spins)) {
  const int n = static_cast<int>(spins_.size());
  dim_ = 1 << n;

  Matrix ix(2, 2), iy(2, 2), iz(2, 2), ip(2, 2), im(2, 2);
  ix << 0.0, 0.5, 0.5, 0.0;
  iy << 0.0, -0.5 * kI, 0.5 * kI, 0.0;
  iz << 0.5, 0.0, 0.0, -0.5;
  ip << 0.0, 1.0, 0.0, 0.0;
  im << 0.0, 0.0, 1.0, 0.0;
  const std::array<Matrix, 5> single{ix, iy, iz, ip, im};

  ops_.resize(n);
  for (int k = 0; k < n; ++k) {
    for (int s = 0; s < 5; ++s) {
      Matrix m = Matrix::Identity(1, 1);
      for (int j = 0; j < n; ++j)
        m = kron(m, j == k ? single[s] : Matrix::Identity(2, 2));
      ops_[k][s] = std::move(m);
    }
  }

  mz2_h_.assign(dim_, 0);
  mz2_c_.assign(dim_, 0);
  for (int s = 0; s < dim_; ++s) {
    for (int k = 0; k < n; ++k) {
      const int bit = (s >> (n - 1 - k)) & 1;
      const int m2 = bit == 0 ? 1 : -1;  // twice the z quantum number
      if (spins_[k].channel == spinsys::Channel::H1)
        mz2_h_[s] += m2;
      else
        mz2_c_[s] += m2;
    }
  }
}

int OperatorBasis::index_of(int spin_id) const {
  for (int k = 0; k < n_spins(); ++k)
    if (spins_[k].id == spin_id) return k;
  return -1;
}

const Matrix& OperatorBasis::op(int idx, char axis) const {
  return ops_[idx][axis_slot(axis)];
}

Matrix OperatorBasis::channel_sum(spinsys::Channel ch, char axis) const {
  Matrix out = Matrix::Zero(dim_, dim_);
  for (int k = 0; k < n_spins(); ++k)
    if (spins_[k].channel == ch) out += op(k, axis);
  return out;
}

Hamiltonian build_hamiltonian(const OperatorBasis& basis,
                              const std::vector<spinsys::Coupling>& couplings,
                              const HamiltonianOptions& opt) {
  const int dim = basis.dim();
  const int n = basis.n_spins();
  const double two_pi = 2.0 * M_PI;

  Eigen::VectorXd diag = Eigen::VectorXd::Zero(dim);
  // Diagonal secular part: offsets and weak (zz) couplings.
  for (int s = 0; s < dim; ++s) {
    double e = 0.0;
    auto m = [&](int k) { return ((s >> (n - 1 - k)) & 1) == 0 ? 0.5 : -0.5; };
    for (int k = 0; k < n; ++k) e += two_pi * basis.spin(k).shift_hz * m(k);
    for (const auto& c : couplings) {
      if (c.kind == spinsys::CouplingKind::Homonuclear && !opt.include_homonuclear)
        continue;
      if (c.kind == spinsys::CouplingKind::OneBond && opt.decouple_ch) continue;
      const int ka = basis.index_of(c.a);
      const int kb = basis.index_of(c.b);
      if (ka < 0 || kb < 0) continue;
      e += two_pi * c.j_hz * m(ka) * m(kb);
    }
    diag(s) = e;
  }

  Hamiltonian h;
  if (!opt.isotropic_homonuclear) {
    h.diagonal = true;
    h.diag = std::move(diag);
    return h;
  }

  // Isotropic homonuclear option: add the flip-flop part of J(IxIx + IyIy)
  // for proton pairs; the Hamiltonian becomes dense Hermitian.
  Matrix dense = diag.cast<cplx>().asDiagonal();
  for (const auto& c : couplings) {
    if (c.kind != spinsys::CouplingKind::Homonuclear || !opt.include_homonuclear)
      continue;
    const int ka = basis.index_of(c.a);
    const int kb = basis.index_of(c.b);
    if (ka < 0 || kb < 0) continue;
    dense += two_pi * c.j_hz *
             (basis.op(ka, 'x') * basis.op(kb, 'x') +
              basis.op(ka, 'y') * basis.op(kb, 'y'));
  }
  h.diagonal = false;
  h.dense = std::move(dense);
  return h;
}

Matrix equilibrium(const OperatorBasis& basis, bool protons_only) {
  Matrix rho = basis.channel_sum(spinsys::Channel::H1, 'z');
  if (!protons_only)
    rho += kGammaRelC * basis.channel_sum(spinsys::Channel::C13, 'z');
  return rho;
}

Matrix pulse_operator(const OperatorBasis& basis, bool on_h, bool on_c,
                      double angle_rad, double phase_rad) {
  const int n = basis.n_spins();
  const double half = 0.5 * angle_rad;
  const double cx = std::cos(phase_rad);
  const double sy = std::sin(phase_rad);

  // exp(-i*theta*(Ix cos + Iy sin)) per spin, via the Pauli identity.
  Matrix u2(2, 2);
  u2 << std::cos(half), -kI * std::sin(half) * cplx(cx, -sy),
      -kI * std::sin(half) * cplx(cx, sy), std::cos(half);

  Matrix u = Matrix::Identity(1, 1);
  for (int k = 0; k < n; ++k) {
    const bool hit = basis.spin(k).channel == spinsys::Channel::H1 ? on_h : on_c;
    u = kron(u, hit ? u2 : Matrix::Identity(2, 2));
  }
  return u;
}

void apply_unitary(Matrix& rho, const Matrix& u) {
  rho = u * rho * u.adjoint();
}

void evolve(Matrix& rho, const Hamiltonian& h, double seconds) {
  if (seconds == 0.0) return;
  const int dim = static_cast<int>(rho.rows());
  if (h.diagonal) {
    Eigen::VectorXcd ph(dim);
    for (int s = 0; s < dim; ++s)
      ph(s) = std::polar(1.0, -h.diag(s) * seconds);
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c)
        rho(r, c) *= ph(r) * std::conj(ph(c));
    return;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(h.dense);
  Eigen::VectorXcd ph(dim);
  for (int s = 0; s < dim; ++s)
    ph(s) = std::polar(1.0, -es.eigenvalues()(s) * seconds);
  const Matrix u = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
  apply_unitary(rho, u);
}

double project(const Matrix& rho, const Matrix& op) {
  const double norm = (op * op.adjoint()).trace().real();
  if (norm == 0.0) throw ValidationError("projection onto a zero operator");
  return (rho * op.adjoint()).trace().real() / norm;
}

cplx detect(const Matrix& rho, const OperatorBasis& basis) {
  const Matrix plus = basis.channel_sum(spinsys::Channel::H1, 'p');
  // tr(Iz Iz) = 2^(n-2) in an n-spin space: use it as the per-spin scale.
  const double scale = basis.dim() / 4.0;
  return (rho * plus).trace() / scale;
}

std::vector<double> slice_positions(int n_slices) {
  std::vector<double> z(n_slices);
  for (int k = 0; k < n_slices; ++k)
    z[k] = -1.0 + (2.0 * k + 1.0) / n_slices;
  return z;
}

void apply_gradient_slice(Matrix& rho, const OperatorBasis& basis,
                          const GradientSpec& g, double z) {
  const int dim = basis.dim();
  const double ph_h = g.relative_area * g.phase_per_unit * z * kGammaRelH;
  const double ph_c = g.relative_area * g.phase_per_unit * z * kGammaRelC;
  Eigen::VectorXcd ph(dim);
  for (int s = 0; s < dim; ++s)
    ph(s) = std::polar(1.0, -0.5 * (ph_h * basis.twice_mz_h()[s] +
                                    ph_c * basis.twice_mz_c()[s]));
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c)
      rho(r, c) *= ph(r) * std::conj(ph(c));
}

void apply_gradient_exact(WindingEnsemble& e, const OperatorBasis& basis,
                          double relative_area) {
  // Quantize the area so winding keys stay exact integers.
  const std::int64_t qa = std::llround(relative_area * 1e6);
  const auto& mh = basis.twice_mz_h();
  const auto& mc = basis.twice_mz_c();
  const int dim = basis.dim();

  std::map<WindingKey, Matrix> next;
  for (const auto& [key, part] : e.parts) {
    for (int r = 0; r < dim; ++r) {
      for (int c = 0; c < dim; ++c) {
        const cplx v = part(r, c);
        if (v == cplx{}) continue;
        WindingKey nk{key.h + qa * (mh[r] - mh[c]), key.c + qa * (mc[r] - mc[c])};
        auto [it, fresh] = next.try_emplace(nk);
        if (fresh) it->second = Matrix::Zero(dim, dim);
        it->second(r, c) += v;
      }
    }
  }
  // Drop numerically dead components to bound the ensemble size.
  for (auto it = next.begin(); it != next.end();) {
    if (it->second.cwiseAbs().maxCoeff() < 1e-18)
      it = next.erase(it);
    else
      ++it;
  }
  e.parts = std::move(next);
}

Matrix winding_sum(const WindingEnsemble& e, int dim) {
  Matrix out = Matrix::Zero(dim, dim);
  for (const auto& [key, part] : e.parts) out += part;
  return out;
}

Matrix winding_refocused(const WindingEnsemble& e, int dim) {
  auto it = e.parts.find(WindingKey{0, 0});
  if (it == e.parts.end()) return Matrix::Zero(dim, dim);
  return it->second;
}

Matrix parse_product_operator(const OperatorBasis& basis, std::string_view expr,
                              bool* present) {
  if (present) *present = true;
  const std::string file = "<operator>";
  size_t i = 0;
  auto fail = [&](const std::string& msg) -> ParseError {
    return ParseError(file, 1, static_cast<int>(i) + 1,
                      msg + " in '" + std::string(expr) + "'");
  };

  while (i < expr.size() && std::isspace(static_cast<unsigned char>(expr[i]))) ++i;

  // Optional leading real coefficient.
  double coeff = 1.0;
  {
    size_t j = i;
    if (j < expr.size() && (expr[j] == '+' || expr[j] == '-')) ++j;
    size_t digits = j;
    while (digits < expr.size() &&
           (std::isdigit(static_cast<unsigned char>(expr[digits])) ||
            expr[digits] == '.'))
      ++digits;
    if (digits > j) {
      auto [ptr, ec] = std::from_chars(expr.data() + i, expr.data() + digits, coeff);
      if (ec != std::errc()) throw fail("bad coefficient");
      (void)ptr;
      i = digits;
    } else if (j > i) {
      coeff = expr[i] == '-' ? -1.0 : 1.0;
      i = j;
    }
  }

  Matrix m = Matrix::Identity(basis.dim(), basis.dim());
  int factors = 0;
  while (i < expr.size()) {
    if (std::isspace(static_cast<unsigned char>(expr[i])) || expr[i] == '*') {
      ++i;
      continue;
    }
    if (expr[i] != 'I') throw fail("expected factor 'I<id><axis>'");
    ++i;
    size_t d = i;
    while (d < expr.size() && std::isdigit(static_cast<unsigned char>(expr[d]))) ++d;
    if (d == i) throw fail("missing spin id");
    int id = 0;
    std::from_chars(expr.data() + i, expr.data() + d, id);
    i = d;
    if (i >= expr.size() || axis_slot(expr[i]) < 0) throw fail("missing axis");
    const char axis = expr[i];
    ++i;

    const int idx = basis.index_of(id);
    if (idx < 0) {
      if (present) {
        *present = false;
        return Matrix::Zero(basis.dim(), basis.dim());
      }
      throw fail("unknown spin id " + std::to_string(id));
    }
    m = m * basis.op(idx, axis);
    ++factors;
  }
  if (factors == 0) throw fail("no operator factors");
  return coeff * m;
}

std::vector<cplx> acquire(Matrix rho, const OperatorBasis& basis,
                          const Hamiltonian& h, int points, double dwell_s,
                          int receiver_quadrant) {
  static constexpr cplx kQuad[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};  // i^-q
  const cplx rph = kQuad[((receiver_quadrant % 4) + 4) % 4];
  std::vector<cplx> out(points);
  for (int k = 0; k < points; ++k) {
    out[k] = detect(rho, basis) * rph;
    if (k + 1 < points) evolve(rho, h, dwell_s);
  }
  return out;
}

}  // namespace spinecho::engine

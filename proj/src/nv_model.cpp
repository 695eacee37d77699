#include "qb/nv_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace qb {

namespace {

using Matrix3 = SquareMatrix<3>;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::InvalidArgument, what);
}

// Spin-1 operators in the m = (+1, 0, -1) basis.
struct SpinOne {
  Matrix3 x, y, z;

  SpinOne() {
    const double r2 = std::sqrt(2.0);
    Matrix3 raise;
    raise(0, 1) = r2;
    raise(1, 2) = r2;
    const Matrix3 lower = raise.adjoint();
    x = (raise + lower) * 0.5;
    y = (raise - lower) * Complex(0.0, -0.5);
    z = Matrix3::diagonal({1.0, 0.0, -1.0});
  }
};

}  // namespace

void PhysicalConstants::validate() const {
  for (double v : {d, gamma_e, q, gamma_n, a_perp, a_par}) {
    require(std::isfinite(v) && v > 0.0, "physical constants must be finite and strictly positive");
  }
}

void DriveParams::validate() const {
  require(std::isfinite(omega_rabi) && std::isfinite(detuning) && std::isfinite(gamma) &&
              std::isfinite(b_z),
          "drive parameters must be finite");
  require(omega_rabi >= 0.0, "Rabi frequency must be >= 0, got " + fmt(omega_rabi));
  require(gamma >= 0.0, "decay rate must be >= 0, got " + fmt(gamma));
  require(b_z >= 0.0, "field Bz must be >= 0, got " + fmt(b_z));
}

void NuclearInit::validate() const {
  require(std::isfinite(psi) && psi >= 0.0 && psi <= std::numbers::pi,
          "nuclear angle psi must lie in [0, pi], got " + fmt(psi));
}

Splitting qb_splitting(const PhysicalConstants& constants, double b_z) {
  constants.validate();
  require(std::isfinite(b_z) && b_z >= 0.0, "field Bz must be >= 0, got " + fmt(b_z));
  Splitting s;
  s.omega0 = constants.d - constants.gamma_e * b_z;
  s.energy_uev = kHbarMicroEvMicroS * s.omega0;
  return s;
}

double require_positive_splitting(const PhysicalConstants& constants, double b_z) {
  const Splitting s = qb_splitting(constants, b_z);
  require(!s.beyond_crossing(), "Bz = " + fmt(b_z) +
                                    " G is beyond the ground-state level crossing (omega0 = " +
                                    fmt(s.omega0) + " rad/us); refusing to simulate");
  return s.omega0;
}

Matrix9 build_full_hamiltonian(const PhysicalConstants& constants, double b_z) {
  constants.validate();
  require(std::isfinite(b_z) && b_z >= 0.0, "field Bz must be >= 0, got " + fmt(b_z));
  const SpinOne s;
  const Matrix3 one = Matrix3::identity();

  Matrix9 h = kron(s.z * s.z, one) * constants.d;
  h += kron(s.z, one) * (constants.gamma_e * b_z);
  h -= kron(one, s.z * s.z) * constants.q;
  h -= kron(one, s.z) * (constants.gamma_n * b_z);
  h -= (kron(s.x, s.x) + kron(s.y, s.y)) * constants.a_perp;
  h -= kron(s.z, s.z) * constants.a_par;
  return h;
}

std::size_t full_index(int m_s, int m_i) {
  require(m_s >= -1 && m_s <= 1 && m_i >= -1 && m_i <= 1, "spin-1 quantum numbers must be in {-1,0,1}");
  return static_cast<std::size_t>(3 * (1 - m_s) + (1 - m_i));
}

std::array<std::size_t, 4> subspace_indices() {
  // |e> = |m_S=-1>, |g> = |m_S=0>, |up> = |m_I=+1>, |down> = |m_I=0>
  return {full_index(-1, +1), full_index(-1, 0), full_index(0, +1), full_index(0, 0)};
}

SubspaceReport validate_subspace_reduction(const Matrix9& h9, const PhysicalConstants& constants,
                                           double b_z, double tolerance) {
  const double omega0 = qb_splitting(constants, b_z).omega0;
  const double nuclear_offset = -(constants.q + constants.gamma_n * b_z);
  const auto idx = subspace_indices();
  constexpr std::array<bool, 4> electron_excited = {true, true, false, false};
  constexpr std::array<bool, 4> nuclear_up = {true, false, true, false};

  SubspaceReport report;
  report.expected_diagonal = {constants.a_par, 0.0, 0.0, 0.0};
  report.min_coupled_gap = std::numeric_limits<double>::infinity();

  for (std::size_t k = 0; k < 4; ++k) {
    double diag = h9(idx[k], idx[k]).real();
    if (electron_excited[k]) diag -= omega0;
    if (nuclear_up[k]) diag -= nuclear_offset;
    report.reduced_diagonal[k] = diag;
    const double residual = std::abs(diag - report.expected_diagonal[k]);
    if (residual > report.max_diagonal_residual) {
      report.max_diagonal_residual = residual;
      report.worst_element = k;
    }
  }

  for (std::size_t k = 0; k < 4; ++k) {
    const std::size_t i = idx[k];
    for (std::size_t j = 0; j < 9; ++j) {
      if (j == i) continue;
      const double c = std::abs(h9(i, j));
      if (c == 0.0) continue;
      report.max_coupling = std::max(report.max_coupling, c);
      if (std::find(idx.begin(), idx.end(), j) == idx.end()) {
        report.leakage = std::max(report.leakage, c);
      }
      report.min_coupled_gap =
          std::min(report.min_coupled_gap, std::abs(h9(i, i).real() - h9(j, j).real()));
    }
  }

  report.passed = report.max_diagonal_residual <= tolerance;
  if (!report.passed) {
    static constexpr const char* names[] = {"e,up", "e,down", "g,up", "g,down"};
    const std::size_t k = report.worst_element;
    report.diagnostic = "projected diagonal mismatch at <" + std::string(names[k]) + "|H|" +
                        names[k] + ">: got " + fmt(report.reduced_diagonal[k]) + ", expected " +
                        fmt(report.expected_diagonal[k]);
  }
  return report;
}

Matrix4 build_effective_hamiltonian(double detuning, double omega_rabi, double a_par) {
  Matrix4 h;
  h(basis::e_up, basis::e_up) = detuning + a_par;
  h(basis::e_down, basis::e_down) = detuning;
  const double half = 0.5 * omega_rabi;
  h(basis::e_up, basis::g_up) = half;
  h(basis::g_up, basis::e_up) = half;
  h(basis::e_down, basis::g_down) = half;
  h(basis::g_down, basis::e_down) = half;
  return h;
}

BatteryNuclear build_initial_state(const NuclearInit& init) {
  init.validate();
  std::array<Complex, 4> psi{};
  psi[basis::g_up] = std::sin(0.5 * init.psi);
  psi[basis::g_down] = std::cos(0.5 * init.psi);
  return BatteryNuclear::pure(psi);
}

Matrix4 jump_operator() {
  Matrix4 l;
  l(basis::g_up, basis::e_up) = 1.0;
  l(basis::g_down, basis::e_down) = 1.0;
  return l;
}

Matrix4 nuclear_up_projector() {
  return Matrix4::diagonal({1.0, 0.0, 1.0, 0.0});
}

Matrix4 lindblad_rhs(const Matrix4& h, double gamma, const Matrix4& rho) {
  Matrix4 out;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      Complex comm = 0.0;
      for (std::size_t k = 0; k < 4; ++k) comm += h(i, k) * rho(k, j) - rho(i, k) * h(k, j);
      out(i, j) = Complex(comm.imag(), -comm.real());  // -i * comm
    }
  }
  if (gamma != 0.0) {
    // L rho L^dag moves the excited block onto the ground block; L^dag L is
    // the excited-electron projector.
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = 0; j < 4; ++j) {
        const double excited_count = (i < 2 ? 1.0 : 0.0) + (j < 2 ? 1.0 : 0.0);
        Complex d = -0.5 * excited_count * rho(i, j);
        if (i >= 2 && j >= 2) d += rho(i - 2, j - 2);
        out(i, j) += gamma * d;
      }
    }
  }
  return out;
}

}  // namespace qb

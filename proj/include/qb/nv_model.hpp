#pragma once

// NV-center battery model. Internal units: angular frequency in rad/us, time
// in us, magnetic field in Gauss. Frequencies quoted in MHz (f = w/2pi) are
// converted with mhz_to_angular exactly once at ingestion.

#include <array>
#include <cstddef>
#include <numbers>
#include <string>

#include "qb/qcore.hpp"

namespace qb {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
// hbar in ueV * us
inline constexpr double kHbarMicroEvMicroS = 6.582119569e-4;

constexpr double mhz_to_angular(double mhz) { return kTwoPi * mhz; }
constexpr double angular_to_mhz(double w) { return w / kTwoPi; }

struct PhysicalConstants {
  double d = mhz_to_angular(2870.0);          // electron zero-field splitting
  double gamma_e = mhz_to_angular(2.8);       // electron gyromagnetic ratio, per Gauss
  double q = mhz_to_angular(4.96);            // nuclear quadrupole splitting
  double gamma_n = mhz_to_angular(3.07e-4);   // nuclear gyromagnetic ratio, per Gauss
  double a_perp = mhz_to_angular(2.7);
  double a_par = mhz_to_angular(2.14);

  void validate() const;
};

struct DriveParams {
  double omega_rabi = 0.0;  // Rabi frequency
  double detuning = 0.0;    // w0 - w_drive
  double gamma = 0.0;       // electron decay rate
  double b_z = 0.0;         // Gauss

  void validate() const;
};

// Nuclear initialization angle: |psi> = sin(psi/2)|up> + cos(psi/2)|down>.
struct NuclearInit {
  double psi = 0.0;

  void validate() const;
};

struct Splitting {
  double omega0 = 0.0;      // rad/us
  double energy_uev = 0.0;  // hbar * omega0

  // The |m_S=-1> level has crossed below |m_S=0>; the battery encoding is
  // meaningless there and simulations refuse to run.
  bool beyond_crossing() const { return omega0 <= 0.0; }
};

Splitting qb_splitting(const PhysicalConstants& constants, double b_z);

// Throws ErrorCode::InvalidArgument if the field is past the level crossing.
double require_positive_splitting(const PhysicalConstants& constants, double b_z);

// Full electron (S=1) x 14N (I=1) Hamiltonian, index 3*s + i with both spins
// ordered m = (+1, 0, -1).
Matrix9 build_full_hamiltonian(const PhysicalConstants& constants, double b_z);

// Index into the 9-dim space for given magnetic quantum numbers.
std::size_t full_index(int m_s, int m_i);

struct SubspaceReport {
  // Projected diagonal after removing w0 on m_S=-1 and the nuclear offset
  // -(Q + gamma_n Bz) on m_I=+1, in battery basis order.
  std::array<double, 4> reduced_diagonal{};
  std::array<double, 4> expected_diagonal{};
  double max_diagonal_residual = 0.0;
  std::size_t worst_element = 0;  // battery-basis index of the largest residual
  // Largest |H_ij| coupling a subspace state to a different state, inside or
  // outside the subspace. Dropped by the rotating-wave approximation.
  double max_coupling = 0.0;
  // Same, restricted to states outside the subspace.
  double leakage = 0.0;
  // Smallest energy gap between a subspace state and a state it couples to.
  double min_coupled_gap = 0.0;
  bool passed = false;
  std::string diagnostic;
};

// Battery-basis index -> full-space index.
std::array<std::size_t, 4> subspace_indices();

SubspaceReport validate_subspace_reduction(const Matrix9& h9, const PhysicalConstants& constants,
                                           double b_z, double tolerance = 1e-9);

// Rotating-frame Hamiltonian in basis (|e up>, |e down>, |g up>, |g down>).
Matrix4 build_effective_hamiltonian(double detuning, double omega_rabi, double a_par);

BatteryNuclear build_initial_state(const NuclearInit& init);

// Jump operator sigma (x) 1 with sigma = |g><e|.
Matrix4 jump_operator();

// 1 (x) |up><up|
Matrix4 nuclear_up_projector();

// -i[H, rho] + gamma/2 (2 L rho L^dag - {L^dag L, rho}), L = sigma (x) 1.
Matrix4 lindblad_rhs(const Matrix4& h_eff, double gamma, const Matrix4& rho);

inline Matrix4 lindblad_rhs(const Matrix4& h_eff, double gamma, const BatteryNuclear& rho) {
  return lindblad_rhs(h_eff, gamma, rho.matrix());
}

}  // namespace qb

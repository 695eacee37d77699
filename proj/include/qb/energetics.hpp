#pragma once

#include <optional>
#include <span>
#include <vector>

#include "qb/lindblad.hpp"
#include "qb/qcore.hpp"

namespace qb {

// H_b = omega0 |e><e| in (|e>, |g>) order. omega0 = 1 gives energies in
// units of omega0.
class BatteryHamiltonian {
 public:
  explicit BatteryHamiltonian(double omega0 = 1.0);

  double omega0() const { return omega0_; }
  Matrix2 matrix() const;

 private:
  double omega0_;
};

struct EnergeticsRecord {
  double t = 0.0;
  double energy = 0.0;      // E = Tr[H_b rho_b]
  double ergotropy = 0.0;   // W
  double incoherent = 0.0;  // W_inc
  double coherent = 0.0;    // W_coh = W - W_inc
  double coherence = 0.0;   // C in bits
  // W_coh / W; empty when W < 1e-12 * omega0.
  std::optional<double> ratio_coh;
  Matrix2 reduced;
};

double stored_energy(const Qubit& rho, const BatteryHamiltonian& hb);

// Spectrum of rho sorted descending, placed on H_b levels sorted ascending.
Qubit passive_state(const Qubit& rho, const BatteryHamiltonian& hb);

// Diagonal part of rho in the H_b eigenbasis.
Qubit dephased_state(const Qubit& rho, const BatteryHamiltonian& hb);

// Relative-entropy coherence S(dephased) - S(rho), bits.
double coherence_bits(const Qubit& rho, const BatteryHamiltonian& hb);

EnergeticsRecord ergotropy_decomposition(const Qubit& rho, const BatteryHamiltonian& hb,
                                         double t = 0.0);

// Qubit closed forms used as an independent check of the eigendecomposition
// path: W_inc = w0 max(0, 2p - 1), W = w0 (p - (1 - r)/2),
// r = sqrt((2p - 1)^2 + 4|c|^2).
struct QubitErgotropy {
  double ergotropy = 0.0;
  double incoherent = 0.0;
};
QubitErgotropy qubit_ergotropy_closed_form(const Qubit& rho, const BatteryHamiltonian& hb);

std::vector<EnergeticsRecord> energetics_series(const Trajectory& traj, const BatteryHamiltonian& hb);

}  // namespace qb

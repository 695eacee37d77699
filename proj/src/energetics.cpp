#include "qb/energetics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace qb {

namespace {

constexpr double kRatioFloor = 1e-12;

// Tr[H_b sigma] for the passive arrangement of the given spectrum.
double passive_energy(std::array<double, 2> populations, const EigenSystem<2>& levels) {
  std::stable_sort(populations.begin(), populations.end(), std::greater<>());
  double e = 0.0;
  for (std::size_t k = 0; k < 2; ++k) e += populations[k] * levels.values[k];
  return e;
}

Matrix2 projector(const Matrix2& vectors, std::size_t k) {
  Matrix2 p;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) p(i, j) = vectors(i, k) * std::conj(vectors(j, k));
  return p;
}

std::array<double, 2> energy_basis_populations(const Qubit& rho, const EigenSystem<2>& levels) {
  std::array<double, 2> pops{};
  for (std::size_t k = 0; k < 2; ++k) {
    Complex v = 0.0;
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j)
        v += std::conj(levels.vectors(i, k)) * rho(i, j) * levels.vectors(j, k);
    pops[k] = v.real();
  }
  return pops;
}

// States reaching this point already passed DensityMatrix validation (possibly
// with the integrator's looser floor); clamp tiny negative eigenvalues here.
double entropy_of(std::array<double, 2> p) {
  for (auto& v : p) v = std::clamp(v, 0.0, 1.0);
  return entropy_bits(std::span<const double>(p));
}

}  // namespace

BatteryHamiltonian::BatteryHamiltonian(double omega0) : omega0_(omega0) {
  if (!std::isfinite(omega0) || !(omega0 > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "battery splitting omega0 must be > 0");
  }
}

Matrix2 BatteryHamiltonian::matrix() const {
  return Matrix2::diagonal({omega0_, 0.0});
}

double stored_energy(const Qubit& rho, const BatteryHamiltonian& hb) {
  return (hb.matrix() * rho.matrix()).trace().real();
}

Qubit passive_state(const Qubit& rho, const BatteryHamiltonian& hb) {
  const auto levels = hermitian_eigensystem(hb.matrix());
  auto spectrum = hermitian_eigensystem(rho.matrix()).values;
  std::stable_sort(spectrum.begin(), spectrum.end(), std::greater<>());
  Matrix2 out;
  for (std::size_t k = 0; k < 2; ++k) out += projector(levels.vectors, k) * spectrum[k];
  return Qubit(out);
}

Qubit dephased_state(const Qubit& rho, const BatteryHamiltonian& hb) {
  const auto levels = hermitian_eigensystem(hb.matrix());
  const auto pops = energy_basis_populations(rho, levels);
  Matrix2 out;
  for (std::size_t k = 0; k < 2; ++k) out += projector(levels.vectors, k) * pops[k];
  return Qubit(out);
}

double coherence_bits(const Qubit& rho, const BatteryHamiltonian& hb) {
  const auto levels = hermitian_eigensystem(hb.matrix());
  const auto pops = energy_basis_populations(rho, levels);
  const auto spectrum = hermitian_eigensystem(rho.matrix()).values;
  return std::max(0.0, entropy_of(pops) - entropy_of(spectrum));
}

EnergeticsRecord ergotropy_decomposition(const Qubit& rho, const BatteryHamiltonian& hb, double t) {
  const auto levels = hermitian_eigensystem(hb.matrix());
  const auto spectrum = hermitian_eigensystem(rho.matrix()).values;
  const auto pops = energy_basis_populations(rho, levels);

  EnergeticsRecord r;
  r.t = t;
  r.reduced = rho.matrix();
  r.energy = stored_energy(rho, hb);
  r.ergotropy = r.energy - passive_energy(spectrum, levels);
  r.incoherent = r.energy - passive_energy(pops, levels);
  r.coherent = r.ergotropy - r.incoherent;
  r.coherence = std::max(0.0, entropy_of(pops) - entropy_of(spectrum));
  if (r.ergotropy >= kRatioFloor * hb.omega0()) r.ratio_coh = r.coherent / r.ergotropy;
  return r;
}

QubitErgotropy qubit_ergotropy_closed_form(const Qubit& rho, const BatteryHamiltonian& hb) {
  const double p = rho(basis::excited, basis::excited).real();
  const double c = std::abs(rho(basis::excited, basis::ground));
  const double r = std::sqrt((2.0 * p - 1.0) * (2.0 * p - 1.0) + 4.0 * c * c);
  return QubitErgotropy{hb.omega0() * (p - 0.5 * (1.0 - r)),
                        hb.omega0() * std::max(0.0, 2.0 * p - 1.0)};
}

std::vector<EnergeticsRecord> energetics_series(const Trajectory& traj, const BatteryHamiltonian& hb) {
  std::vector<EnergeticsRecord> out;
  out.reserve(traj.states.size());
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const Qubit reduced =
        Qubit::with_positivity_floor(partial_trace_nuclear(traj.states[i].matrix()), 1e-6);
    out.push_back(ergotropy_decomposition(reduced, hb, traj.time(i)));
  }
  return out;
}

}  // namespace qb

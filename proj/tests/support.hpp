#pragma once

// Fixed-seed generators and small independent helpers shared by the tests.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

#include "qb/qcore.hpp"

namespace qbt {

using qb::Complex;

// splitmix64; deterministic across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    const double u1 = std::max(uniform(), 1e-300);
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  Complex complex_normal() { return {normal(), normal()}; }

 private:
  std::uint64_t state_;
};

template <std::size_t N>
qb::SquareMatrix<N> random_complex_matrix(Rng& rng) {
  qb::SquareMatrix<N> m;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) m(i, j) = rng.complex_normal();
  return m;
}

template <std::size_t N>
qb::SquareMatrix<N> random_hermitian(Rng& rng, double scale = 1.0) {
  const auto g = random_complex_matrix<N>(rng);
  return (g + g.adjoint()) * (0.5 * scale);
}

// G G^dag / Tr with G having `rank` columns: full rank by default, rank 1 gives a pure state.
template <std::size_t N>
qb::SquareMatrix<N> random_density_matrix(Rng& rng, std::size_t rank = N) {
  qb::SquareMatrix<N> g;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < rank; ++j) g(i, j) = rng.complex_normal();
  auto rho = g * g.adjoint();
  const double tr = rho.trace().real();
  rho = rho * (1.0 / tr);
  return qb::hermitian_part(rho);
}

template <std::size_t N>
std::array<Complex, N> random_ket(Rng& rng) {
  std::array<Complex, N> psi{};
  double norm = 0.0;
  for (auto& a : psi) {
    a = rng.complex_normal();
    norm += std::norm(a);
  }
  for (auto& a : psi) a /= std::sqrt(norm);
  return psi;
}

// Modified Gram-Schmidt on the columns of a Gaussian matrix.
template <std::size_t N>
qb::SquareMatrix<N> random_unitary(Rng& rng) {
  auto m = random_complex_matrix<N>(rng);
  for (std::size_t k = 0; k < N; ++k) {
    for (std::size_t j = 0; j < k; ++j) {
      Complex dot = 0.0;
      for (std::size_t i = 0; i < N; ++i) dot += std::conj(m(i, j)) * m(i, k);
      for (std::size_t i = 0; i < N; ++i) m(i, k) -= dot * m(i, j);
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < N; ++i) norm += std::norm(m(i, k));
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < N; ++i) m(i, k) /= norm;
  }
  return m;
}

template <std::size_t N>
double max_diff(const qb::SquareMatrix<N>& a, const qb::SquareMatrix<N>& b) {
  return (a - b).max_abs();
}

inline double binary_entropy(double p) {
  double s = 0.0;
  for (double x : {p, 1.0 - p})
    if (x > 0.0) s -= x * std::log2(x);
  return s;
}

// Qubit entropy from the 2x2 spectrum (1 +- r)/2 with r the Bloch length.
inline double qubit_entropy(double p_e, Complex c) {
  const double r = std::sqrt((2.0 * p_e - 1.0) * (2.0 * p_e - 1.0) + 4.0 * std::norm(c));
  return binary_entropy(0.5 * (1.0 + std::min(r, 1.0)));
}

}  // namespace qbt

#pragma once

// Dense complex linear algebra for the small fixed dimensions used by the
// battery model: 2 (battery qubit), 4 (battery + nuclear qubit) and 9 (full
// spin-1 electron + spin-1 nucleus).

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>

#include "qb/error.hpp"

namespace qb {

using Complex = std::complex<double>;

template <std::size_t N>
class SquareMatrix {
 public:
  static constexpr std::size_t dim = N;

  SquareMatrix() = default;

  // Row-major literal; missing entries stay zero.
  SquareMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
    if (rows.size() != N) {
      throw Error(ErrorCode::InvalidArgument, "matrix literal has wrong row count");
    }
    std::size_t i = 0;
    for (const auto& row : rows) {
      if (row.size() != N) {
        throw Error(ErrorCode::InvalidArgument, "matrix literal has wrong column count");
      }
      std::size_t j = 0;
      for (const auto& v : row) (*this)(i, j++) = v;
      ++i;
    }
  }

  static SquareMatrix identity() {
    SquareMatrix m;
    for (std::size_t i = 0; i < N; ++i) m(i, i) = 1.0;
    return m;
  }

  static SquareMatrix diagonal(const std::array<Complex, N>& d) {
    SquareMatrix m;
    for (std::size_t i = 0; i < N; ++i) m(i, i) = d[i];
    return m;
  }

  Complex& operator()(std::size_t i, std::size_t j) { return data_[i * N + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * N + j]; }

  std::span<const Complex, N * N> entries() const { return data_; }
  std::span<Complex, N * N> entries() { return data_; }

  SquareMatrix adjoint() const {
    SquareMatrix out;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) out(j, i) = std::conj((*this)(i, j));
    return out;
  }

  Complex trace() const {
    Complex t = 0.0;
    for (std::size_t i = 0; i < N; ++i) t += (*this)(i, i);
    return t;
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (const auto& v : data_) s += std::norm(v);
    return std::sqrt(s);
  }

  bool all_finite() const {
    for (const auto& v : data_)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
  }

  SquareMatrix& operator+=(const SquareMatrix& o) {
    for (std::size_t k = 0; k < N * N; ++k) data_[k] += o.data_[k];
    return *this;
  }
  SquareMatrix& operator-=(const SquareMatrix& o) {
    for (std::size_t k = 0; k < N * N; ++k) data_[k] -= o.data_[k];
    return *this;
  }
  SquareMatrix& operator*=(Complex s) {
    for (auto& v : data_) v *= s;
    return *this;
  }

  friend SquareMatrix operator+(SquareMatrix a, const SquareMatrix& b) { return a += b; }
  friend SquareMatrix operator-(SquareMatrix a, const SquareMatrix& b) { return a -= b; }
  friend SquareMatrix operator*(SquareMatrix a, Complex s) { return a *= s; }
  friend SquareMatrix operator*(Complex s, SquareMatrix a) { return a *= s; }

  friend SquareMatrix operator*(const SquareMatrix& a, const SquareMatrix& b) {
    SquareMatrix out;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t k = 0; k < N; ++k) {
        const Complex aik = a(i, k);
        if (aik == Complex{}) continue;
        for (std::size_t j = 0; j < N; ++j) out(i, j) += aik * b(k, j);
      }
    return out;
  }

  friend bool operator==(const SquareMatrix&, const SquareMatrix&) = default;

 private:
  std::array<Complex, N * N> data_{};
};

using Matrix2 = SquareMatrix<2>;
using Matrix4 = SquareMatrix<4>;
using Matrix9 = SquareMatrix<9>;

// max_ij |M_ij - conj(M_ji)|
template <std::size_t N>
double max_asymmetry(const SquareMatrix<N>& m) {
  double worst = 0.0;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i; j < N; ++j)
      worst = std::max(worst, std::abs(m(i, j) - std::conj(m(j, i))));
  return worst;
}

template <std::size_t N>
double max_abs_diff(const SquareMatrix<N>& a, const SquareMatrix<N>& b) {
  return (a - b).max_abs();
}

template <std::size_t N>
SquareMatrix<N> commutator(const SquareMatrix<N>& a, const SquareMatrix<N>& b) {
  return a * b - b * a;
}

// (M + M†)/2
template <std::size_t N>
SquareMatrix<N> hermitian_part(const SquareMatrix<N>& m) {
  return (m + m.adjoint()) * 0.5;
}

template <std::size_t A, std::size_t B>
SquareMatrix<A * B> kron(const SquareMatrix<A>& a, const SquareMatrix<B>& b) {
  SquareMatrix<A * B> out;
  for (std::size_t i = 0; i < A; ++i)
    for (std::size_t j = 0; j < A; ++j)
      for (std::size_t k = 0; k < B; ++k)
        for (std::size_t l = 0; l < B; ++l) out(i * B + k, j * B + l) = a(i, j) * b(k, l);
  return out;
}

template <std::size_t N>
struct EigenSystem {
  std::array<double, N> values{};  // ascending
  SquareMatrix<N> vectors;         // column k pairs with values[k]
};

// Closed form for N == 2, cyclic complex Jacobi otherwise. Throws
// ErrorCode::NotHermitian (with the measured asymmetry) for non-Hermitian input.
template <std::size_t N>
EigenSystem<N> hermitian_eigensystem(const SquareMatrix<N>& m);

extern template EigenSystem<2> hermitian_eigensystem(const SquareMatrix<2>&);
extern template EigenSystem<4> hermitian_eigensystem(const SquareMatrix<4>&);
extern template EigenSystem<9> hermitian_eigensystem(const SquareMatrix<9>&);

namespace tolerance {
inline constexpr double kHermitian = 1e-10;
inline constexpr double kTrace = 1e-9;
inline constexpr double kPositivity = 1e-9;
}  // namespace tolerance

// A validated density matrix: Hermitian, unit trace, positive semidefinite
// (all within the tolerances above).
template <std::size_t N>
class DensityMatrix {
 public:
  // Validates and throws ErrorCode::InvalidState on violation.
  explicit DensityMatrix(const SquareMatrix<N>& m) : m_(m) { validate(m_, tolerance::kPositivity); }

  // Validates against a looser positivity floor; used by integrators that
  // tolerate small negative excursions and report them separately.
  static DensityMatrix with_positivity_floor(const SquareMatrix<N>& m, double floor) {
    validate(m, floor);
    return DensityMatrix(m, Unchecked{});
  }

  static DensityMatrix pure(const std::array<Complex, N>& psi);

  const SquareMatrix<N>& matrix() const { return m_; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

  double purity() const { return (m_ * m_).trace().real(); }
  double min_eigenvalue() const { return hermitian_eigensystem(m_).values.front(); }

 private:
  struct Unchecked {};
  DensityMatrix(const SquareMatrix<N>& m, Unchecked) : m_(m) {}

  static void validate(const SquareMatrix<N>& m, double positivity_floor);

  SquareMatrix<N> m_;
};

extern template class DensityMatrix<2>;
extern template class DensityMatrix<4>;
extern template class DensityMatrix<9>;

using Qubit = DensityMatrix<2>;
using BatteryNuclear = DensityMatrix<4>;

// Von Neumann entropy in bits. Eigenvalues within 1e-9 outside [0,1] are
// clamped; larger violations throw.
double entropy_bits(std::span<const double> eigenvalues);

template <std::size_t N>
double entropy_bits(const DensityMatrix<N>& rho) {
  const auto es = hermitian_eigensystem(rho.matrix());
  return entropy_bits(std::span<const double>(es.values));
}

// Basis ordering for the battery+nucleus space: index = 2*electron + nuclear,
// electron (|e>, |g>), nuclear (|up>, |down>).
namespace basis {
inline constexpr std::size_t e_up = 0;
inline constexpr std::size_t e_down = 1;
inline constexpr std::size_t g_up = 2;
inline constexpr std::size_t g_down = 3;
inline constexpr std::size_t excited = 0;  // qubit index of |e>
inline constexpr std::size_t ground = 1;   // qubit index of |g>
}  // namespace basis

Matrix2 partial_trace_nuclear(const Matrix4& m);
Qubit partial_trace_nuclear(const BatteryNuclear& rho);

// Nuclear reduced state (trace over the electron).
Matrix2 partial_trace_electron(const Matrix4& m);

// rho(t) = exp(-iHt) rho0 exp(iHt) via the eigendecomposition of H.
template <std::size_t N>
DensityMatrix<N> unitary_evolve(const SquareMatrix<N>& h, const DensityMatrix<N>& rho0, double t);

// exp(-iHt) for Hermitian H.
template <std::size_t N>
SquareMatrix<N> unitary_propagator(const SquareMatrix<N>& h, double t);

extern template DensityMatrix<2> unitary_evolve(const SquareMatrix<2>&, const DensityMatrix<2>&, double);
extern template DensityMatrix<4> unitary_evolve(const SquareMatrix<4>&, const DensityMatrix<4>&, double);
extern template SquareMatrix<2> unitary_propagator(const SquareMatrix<2>&, double);
extern template SquareMatrix<4> unitary_propagator(const SquareMatrix<4>&, double);
extern template SquareMatrix<9> unitary_propagator(const SquareMatrix<9>&, double);

}  // namespace qb

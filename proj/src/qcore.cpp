#include "qb/qcore.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <string>

namespace qb {

namespace {

constexpr double kJacobiThreshold = 1e-12;
constexpr double kJacobiRelativeFloor = 1e-15;  // roundoff floor for large-norm input
constexpr int kMaxJacobiSweeps = 100;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

template <std::size_t N>
void require_hermitian(const SquareMatrix<N>& m) {
  if (!m.all_finite()) {
    throw Error(ErrorCode::InvalidArgument, "matrix has non-finite entries");
  }
  const double asym = max_asymmetry(m);
  if (asym > tolerance::kHermitian * std::max(1.0, m.max_abs())) {
    throw Error(ErrorCode::NotHermitian,
                "matrix is not Hermitian: max asymmetry |M - M^dagger| = " + format_double(asym));
  }
}

EigenSystem<2> closed_form_2x2(const Matrix2& m) {
  EigenSystem<2> es;
  const double a = m(0, 0).real();
  const double d = m(1, 1).real();
  const Complex b = 0.5 * (m(0, 1) + std::conj(m(1, 0)));

  if (std::abs(b) == 0.0) {
    if (a <= d) {
      es.values = {a, d};
      es.vectors = Matrix2::identity();
    } else {
      es.values = {d, a};
      es.vectors = Matrix2{{0.0, 1.0}, {1.0, 0.0}};
    }
    return es;
  }

  const double mean = 0.5 * (a + d);
  const double radius = std::hypot(0.5 * (a - d), std::abs(b));
  const double lower = mean - radius;
  es.values = {lower, mean + radius};

  // Two candidate null vectors of (M - lower); keep the better conditioned one.
  Complex x1 = b, y1 = lower - a;
  Complex x2 = lower - d, y2 = std::conj(b);
  const double n1 = std::norm(x1) + std::norm(y1);
  const double n2 = std::norm(x2) + std::norm(y2);
  Complex x = n1 >= n2 ? x1 : x2;
  Complex y = n1 >= n2 ? y1 : y2;
  const double norm = std::sqrt(std::max(n1, n2));
  x /= norm;
  y /= norm;

  es.vectors(0, 0) = x;
  es.vectors(1, 0) = y;
  es.vectors(0, 1) = -std::conj(y);
  es.vectors(1, 1) = std::conj(x);
  return es;
}

template <std::size_t N>
double off_diagonal_norm(const SquareMatrix<N>& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

// Cyclic complex Jacobi. Each rotation first removes the phase of a(p,q) and
// then applies the real symmetric rotation that zeroes it.
template <std::size_t N>
EigenSystem<N> jacobi(SquareMatrix<N> a) {
  SquareMatrix<N> v = SquareMatrix<N>::identity();
  const double stop = std::max(kJacobiThreshold, kJacobiRelativeFloor * a.frobenius_norm());

  for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
    if (off_diagonal_norm(a) < stop) break;
    for (std::size_t p = 0; p + 1 < N; ++p) {
      for (std::size_t q = p + 1; q < N; ++q) {
        const Complex apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag < 1e-300) continue;
        const Complex phase = apq / mag;
        const Complex phase_conj = std::conj(phase);
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double tau = (aqq - app) / (2.0 * mag);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        for (std::size_t k = 0; k < N; ++k) {
          const Complex akp = a(k, p);
          const Complex akq = a(k, q);
          a(k, p) = c * akp - s * phase_conj * akq;
          a(k, q) = s * akp + c * phase_conj * akq;
        }
        for (std::size_t k = 0; k < N; ++k) {
          const Complex apk = a(p, k);
          const Complex aqk = a(q, k);
          a(p, k) = c * apk - s * phase * aqk;
          a(q, k) = s * apk + c * phase * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();

        for (std::size_t k = 0; k < N; ++k) {
          const Complex vkp = v(k, p);
          const Complex vkq = v(k, q);
          v(k, p) = c * vkp - s * phase_conj * vkq;
          v(k, q) = s * vkp + c * phase_conj * vkq;
        }
      }
    }
  }

  std::array<std::size_t, N> order;
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return a(i, i).real() < a(j, j).real();
  });

  EigenSystem<N> es;
  for (std::size_t k = 0; k < N; ++k) {
    es.values[k] = a(order[k], order[k]).real();
    for (std::size_t r = 0; r < N; ++r) es.vectors(r, k) = v(r, order[k]);
  }
  return es;
}

}  // namespace

template <std::size_t N>
EigenSystem<N> hermitian_eigensystem(const SquareMatrix<N>& m) {
  require_hermitian(m);
  if constexpr (N == 2) {
    return closed_form_2x2(m);
  } else {
    return jacobi(hermitian_part(m));
  }
}

template EigenSystem<2> hermitian_eigensystem(const SquareMatrix<2>&);
template EigenSystem<4> hermitian_eigensystem(const SquareMatrix<4>&);
template EigenSystem<9> hermitian_eigensystem(const SquareMatrix<9>&);

template <std::size_t N>
void DensityMatrix<N>::validate(const SquareMatrix<N>& m, double positivity_floor) {
  if (!m.all_finite()) {
    throw Error(ErrorCode::InvalidState, "density matrix has non-finite entries");
  }
  const double asym = max_asymmetry(m);
  if (asym > tolerance::kHermitian) {
    throw Error(ErrorCode::InvalidState,
                "density matrix is not Hermitian: max |M - M^dagger| = " + format_double(asym));
  }
  const Complex tr = m.trace();
  if (std::abs(tr - 1.0) > tolerance::kTrace) {
    throw Error(ErrorCode::InvalidState,
                "density matrix trace deviates from 1 by " + format_double(std::abs(tr - 1.0)));
  }
  const double lowest = hermitian_eigensystem(hermitian_part(m)).values.front();
  if (lowest < -positivity_floor) {
    throw Error(ErrorCode::InvalidState,
                "density matrix has negative eigenvalue " + format_double(lowest));
  }
}

template <std::size_t N>
DensityMatrix<N> DensityMatrix<N>::pure(const std::array<Complex, N>& psi) {
  double norm = 0.0;
  for (const auto& a : psi) norm += std::norm(a);
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw Error(ErrorCode::InvalidArgument, "state vector has zero or non-finite norm");
  }
  SquareMatrix<N> m;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) m(i, j) = psi[i] * std::conj(psi[j]) / norm;
  return DensityMatrix(m);
}

template class DensityMatrix<2>;
template class DensityMatrix<4>;
template class DensityMatrix<9>;

double entropy_bits(std::span<const double> eigenvalues) {
  double s = 0.0;
  for (double p : eigenvalues) {
    if (p < -tolerance::kPositivity || p > 1.0 + tolerance::kPositivity) {
      throw Error(ErrorCode::InvalidState,
                  "eigenvalue " + format_double(p) + " outside [0,1] beyond tolerance");
    }
    p = std::clamp(p, 0.0, 1.0);
    if (p > 0.0) s -= p * std::log2(p);
  }
  return std::max(0.0, s);
}

Matrix2 partial_trace_nuclear(const Matrix4& m) {
  Matrix2 out;
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b)
      for (std::size_t n = 0; n < 2; ++n) out(a, b) += m(2 * a + n, 2 * b + n);
  return out;
}

Qubit partial_trace_nuclear(const BatteryNuclear& rho) {
  return Qubit(partial_trace_nuclear(rho.matrix()));
}

Matrix2 partial_trace_electron(const Matrix4& m) {
  Matrix2 out;
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b)
      for (std::size_t e = 0; e < 2; ++e) out(a, b) += m(2 * e + a, 2 * e + b);
  return out;
}

template <std::size_t N>
SquareMatrix<N> unitary_propagator(const SquareMatrix<N>& h, double t) {
  const auto es = hermitian_eigensystem(h);
  SquareMatrix<N> u;
  for (std::size_t k = 0; k < N; ++k) {
    const Complex phase = std::polar(1.0, -es.values[k] * t);
    for (std::size_t i = 0; i < N; ++i) {
      const Complex vik = es.vectors(i, k) * phase;
      for (std::size_t j = 0; j < N; ++j) u(i, j) += vik * std::conj(es.vectors(j, k));
    }
  }
  return u;
}

template <std::size_t N>
DensityMatrix<N> unitary_evolve(const SquareMatrix<N>& h, const DensityMatrix<N>& rho0, double t) {
  const SquareMatrix<N> u = unitary_propagator(h, t);
  return DensityMatrix<N>(hermitian_part(u * rho0.matrix() * u.adjoint()));
}

template SquareMatrix<2> unitary_propagator(const SquareMatrix<2>&, double);
template SquareMatrix<4> unitary_propagator(const SquareMatrix<4>&, double);
template SquareMatrix<9> unitary_propagator(const SquareMatrix<9>&, double);
template DensityMatrix<2> unitary_evolve(const SquareMatrix<2>&, const DensityMatrix<2>&, double);
template DensityMatrix<4> unitary_evolve(const SquareMatrix<4>&, const DensityMatrix<4>&, double);

}  // namespace qb

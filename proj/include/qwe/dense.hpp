#pragma once

// Small dense complex matrices over the q^n-dimensional Hilbert space.
// Oracle-grade code: used by the brute-force enumerator oracle and by tests
// to validate the exact symbolic algebra.  Never used in the contraction
// engine itself.

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "qwe/errors.hpp"
#include "qwe/pauli.hpp"

namespace qwe {

using Cx = std::complex<double>;

struct DMat {
  size_t dim = 0;
  std::vector<Cx> a;  // row-major dim x dim

  DMat() = default;
  explicit DMat(size_t d) : dim(d), a(d * d, Cx(0)) {}
  Cx& at(size_t r, size_t c) { return a[r * dim + c]; }
  const Cx& at(size_t r, size_t c) const { return a[r * dim + c]; }

  static DMat eye(size_t d) {
    DMat m(d);
    for (size_t i = 0; i < d; ++i) m.at(i, i) = 1;
    return m;
  }
};

inline DMat operator*(const DMat& x, const DMat& y) {
  if (x.dim != y.dim) throw ValidationError("dense matrix dim mismatch");
  DMat out(x.dim);
  for (size_t i = 0; i < x.dim; ++i)
    for (size_t k = 0; k < x.dim; ++k) {
      const Cx v = x.at(i, k);
      if (v == Cx(0)) continue;
      for (size_t j = 0; j < x.dim; ++j) out.at(i, j) += v * y.at(k, j);
    }
  return out;
}

inline DMat operator+(const DMat& x, const DMat& y) {
  if (x.dim != y.dim) throw ValidationError("dense matrix dim mismatch");
  DMat out = x;
  for (size_t i = 0; i < out.a.size(); ++i) out.a[i] += y.a[i];
  return out;
}

inline DMat scale(DMat m, Cx s) {
  for (auto& v : m.a) v *= s;
  return m;
}

inline DMat dagger(const DMat& m) {
  DMat out(m.dim);
  for (size_t i = 0; i < m.dim; ++i)
    for (size_t j = 0; j < m.dim; ++j) out.at(i, j) = std::conj(m.at(j, i));
  return out;
}

inline DMat transpose_mat(const DMat& m) {
  DMat out(m.dim);
  for (size_t i = 0; i < m.dim; ++i)
    for (size_t j = 0; j < m.dim; ++j) out.at(i, j) = m.at(j, i);
  return out;
}

inline DMat conj_mat(const DMat& m) {
  DMat out(m.dim);
  for (size_t i = 0; i < m.a.size(); ++i) out.a[i] = std::conj(m.a[i]);
  return out;
}

inline Cx trace(const DMat& m) {
  Cx t = 0;
  for (size_t i = 0; i < m.dim; ++i) t += m.at(i, i);
  return t;
}

inline DMat kron(const DMat& x, const DMat& y) {
  DMat out(x.dim * y.dim);
  for (size_t i = 0; i < x.dim; ++i)
    for (size_t j = 0; j < x.dim; ++j) {
      const Cx v = x.at(i, j);
      if (v == Cx(0)) continue;
      for (size_t k = 0; k < y.dim; ++k)
        for (size_t l = 0; l < y.dim; ++l)
          out.at(i * y.dim + k, j * y.dim + l) = v * y.at(k, l);
    }
  return out;
}

inline double max_abs_diff(const DMat& x, const DMat& y) {
  if (x.dim != y.dim) return 1e300;
  double m = 0;
  for (size_t i = 0; i < x.a.size(); ++i) m = std::max(m, std::abs(x.a[i] - y.a[i]));
  return m;
}

inline bool is_hermitian(const DMat& m, double tol) {
  for (size_t i = 0; i < m.dim; ++i)
    for (size_t j = 0; j < m.dim; ++j)
      if (std::abs(m.at(i, j) - std::conj(m.at(j, i))) > tol) return false;
  return true;
}

// Permutation-with-phase action of a phased Pauli: P |j> = c_j |sigma(j)>,
// with j a base-q digit string.  X^a Z^b |j> = zeta^{b j} |j + a>.
struct PauliAction {
  std::vector<size_t> sigma;  // image index per basis state
  std::vector<Cx> c;          // amplitude per basis state

  PauliAction(const PhasedPauli& p) {
    const uint32_t q = p.q();
    const size_t n = p.n();
    size_t dim = 1;
    for (size_t i = 0; i < n; ++i) {
      dim *= q;
      if (dim > (1u << 24)) throw ResourceError("dense dimension too large");
    }
    sigma.resize(dim);
    c.resize(dim);
    const double tau_angle = 2.0 * M_PI / (4.0 * q);
    const Cx global = std::polar(1.0, tau_angle * p.phase);
    std::vector<uint32_t> digits(n);
    for (size_t j = 0; j < dim; ++j) {
      size_t rem = j;
      for (size_t s = n; s-- > 0;) {
        digits[s] = rem % q;
        rem /= q;
      }
      // zeta^{sum b_s j_s}, then shift each digit by a_s.
      uint64_t zexp = 0;
      size_t img = 0;
      for (size_t s = 0; s < n; ++s) {
        zexp += static_cast<uint64_t>(p.u.z[s]) * digits[s];
        img = img * q + (digits[s] + p.u.x[s]) % q;
      }
      sigma[j] = img;
      c[j] = global * std::polar(1.0, 2.0 * M_PI * (zexp % q) / q);
    }
  }
};

inline DMat pauli_matrix(const PhasedPauli& p) {
  PauliAction act(p);
  DMat m(act.sigma.size());
  for (size_t j = 0; j < act.sigma.size(); ++j) m.at(act.sigma[j], j) = act.c[j];
  return m;
}

}  // namespace qwe

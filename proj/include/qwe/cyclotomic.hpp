#pragma once

// Exact arithmetic in the cyclotomic fields used for Pauli phase bookkeeping.
//
// For a prime q the single-site Pauli operators are generated by the shift X
// and clock Z with Z X = zeta X Z, zeta = e^{2 pi i / q}.  Phases of products
// of (canonically normalized) Pauli strings live in the group of 4q-th roots
// of unity generated by tau = e^{2 pi i / (4q)}.  All quantities this library
// ultimately reports (enumerator coefficients) lie in
//   Q(i)       for q = 2   (basis 1, i),
//   Q(zeta_q)  for odd q   (basis 1, zeta, ..., zeta^{q-2}),
// so Cyc represents elements of that field exactly, with rational
// coefficients.  Phase exponents that fall outside the field (e.g. tau^1 for
// q = 2) cannot arise from consistent stabilizer data; converting one raises
// ConsistencyError, which acts as an early corruption guard.

#include <boost/container/small_vector.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>

#include "qwe/errors.hpp"

namespace qwe {

using BigInt = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline std::string rat_to_string(const Rat& r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

class Cyc {
 public:
  Cyc() : q_(2) {}
  explicit Cyc(uint32_t q) : q_(q) {}
  Cyc(uint32_t q, Rat r) : q_(q) {
    if (r != 0) c_.push_back(std::move(r));
  }
  static Cyc zero(uint32_t q) { return Cyc(q); }
  static Cyc one(uint32_t q) { return Cyc(q, Rat(1)); }

  // Degree of the field over Q: 2 for q=2, q-1 for odd prime q.
  static uint32_t field_degree(uint32_t q) { return q == 2 ? 2 : q - 1; }

  uint32_t q() const { return q_; }
  bool is_zero() const { return c_.empty(); }
  bool is_rational() const { return c_.size() <= 1; }

  // The rational part fails loudly when the value is not rational.
  const Rat& as_rational() const {
    static const Rat kZero(0);
    if (c_.empty()) return kZero;
    if (c_.size() > 1)
      throw ConsistencyError("cyclotomic value is not rational: " + to_string());
    return c_[0];
  }

  // tau^p where tau = e^{2 pi i/(4q)}, p taken mod 4q.  Only exponents that
  // land inside the coefficient field are representable.
  static Cyc root_of_unity(uint32_t q, int64_t p) {
    const int64_t m = 4 * static_cast<int64_t>(q);
    p %= m;
    if (p < 0) p += m;
    Cyc out(q);
    if (q == 2) {
      // tau = e^{i pi/4}; representable exponents are the even ones: i^{p/2}.
      if (p % 2 != 0)
        throw ConsistencyError("phase exponent " + std::to_string(p) +
                               " (of 8) is outside Q(i)");
      switch ((p / 2) % 4) {
        case 0: out.c_ = {Rat(1)}; break;
        case 1: out.c_ = {Rat(0), Rat(1)}; break;
        case 2: out.c_ = {Rat(-1)}; break;
        case 3: out.c_ = {Rat(0), Rat(-1)}; break;
      }
      out.trim();
      return out;
    }
    // Odd q: the roots of unity inside Q(zeta_q) are the 2q-th roots
    // <-zeta_q>, i.e. tau^p with p even.  tau^2 = -zeta^{(q+1)/2}.
    if (p % 2 != 0)
      throw ConsistencyError("phase exponent " + std::to_string(p) + " (of " +
                             std::to_string(m) + ") is outside Q(zeta_" +
                             std::to_string(q) + ")");
    const int64_t half = p / 2;
    const int64_t c = (q + 1) / 2;
    Cyc v = zeta_pow(q, c * half);
    if (half % 2 != 0) v = -v;
    return v;
  }

  // zeta_q^k as a field element (q odd; for q=2 this is (-1)^k).
  static Cyc zeta_pow(uint32_t q, int64_t k) {
    k %= q;
    if (k < 0) k += q;
    Cyc out(q);
    if (q == 2) {
      out.c_ = {Rat(k == 0 ? 1 : -1)};
      return out;
    }
    const uint32_t deg = q - 1;
    if (static_cast<uint32_t>(k) < deg) {
      out.c_.assign(k + 1, Rat(0));
      out.c_[k] = 1;
    } else {
      // zeta^{q-1} = -(1 + zeta + ... + zeta^{q-2}).
      out.c_.assign(deg, Rat(-1));
    }
    out.trim();
    return out;
  }

  Cyc operator-() const {
    Cyc out(q_);
    out.c_.reserve(c_.size());
    for (const auto& x : c_) out.c_.push_back(-x);
    return out;
  }

  Cyc& operator+=(const Cyc& o) {
    check_q(o);
    if (c_.size() < o.c_.size()) c_.resize(o.c_.size(), Rat(0));
    for (size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
    trim();
    return *this;
  }
  Cyc& operator-=(const Cyc& o) {
    check_q(o);
    if (c_.size() < o.c_.size()) c_.resize(o.c_.size(), Rat(0));
    for (size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
    trim();
    return *this;
  }
  friend Cyc operator+(Cyc a, const Cyc& b) { a += b; return a; }
  friend Cyc operator-(Cyc a, const Cyc& b) { a -= b; return a; }

  friend Cyc operator*(const Cyc& a, const Cyc& b) {
    a.check_q(b);
    Cyc out(a.q_);
    if (a.is_zero() || b.is_zero()) return out;
    if (a.c_.size() == 1 && b.c_.size() == 1) {  // plain rational fast path
      out.c_.push_back(a.c_[0] * b.c_[0]);
      out.trim();
      return out;
    }
    if (a.q_ == 2) {
      // (x0 + x1 i)(y0 + y1 i)
      const Rat& x0 = a.c_[0];
      const Rat x1 = a.c_.size() > 1 ? a.c_[1] : Rat(0);
      const Rat& y0 = b.c_[0];
      const Rat y1 = b.c_.size() > 1 ? b.c_[1] : Rat(0);
      out.c_.push_back(x0 * y0 - x1 * y1);
      out.c_.push_back(x0 * y1 + x1 * y0);
      out.trim();
      return out;
    }
    // Odd q: convolve exponents of zeta mod q, then eliminate zeta^{q-1}.
    const uint32_t q = a.q_;
    boost::container::small_vector<Rat, 4> acc(q, Rat(0));
    for (size_t i = 0; i < a.c_.size(); ++i) {
      if (a.c_[i] == 0) continue;
      for (size_t j = 0; j < b.c_.size(); ++j) {
        if (b.c_[j] == 0) continue;
        acc[(i + j) % q] += a.c_[i] * b.c_[j];
      }
    }
    out.c_.assign(acc.begin(), acc.begin() + (q - 1));
    if (acc[q - 1] != 0)
      for (auto& x : out.c_) x -= acc[q - 1];
    out.trim();
    return out;
  }
  Cyc& operator*=(const Cyc& o) { *this = *this * o; return *this; }

  Cyc& scale(const Rat& r) {
    if (r == 0) { c_.clear(); return *this; }
    for (auto& x : c_) x *= r;
    return *this;
  }
  friend Cyc operator*(Cyc a, const Rat& r) { a.scale(r); return a; }

  // Complex conjugate: i -> -i resp. zeta -> zeta^{-1}.
  Cyc conj() const {
    if (is_rational()) return *this;
    Cyc out(q_);
    if (q_ == 2) {
      out.c_ = c_;
      out.c_[1] = -out.c_[1];
      out.trim();
      return out;
    }
    for (size_t k = 0; k < c_.size(); ++k) {
      if (c_[k] == 0) continue;
      Cyc term = zeta_pow(q_, -static_cast<int64_t>(k));
      term.scale(c_[k]);
      out += term;
    }
    return out;
  }

  friend bool operator==(const Cyc& a, const Cyc& b) {
    if (a.q_ != b.q_) return false;
    const size_t n = std::max(a.c_.size(), b.c_.size());
    for (size_t i = 0; i < n; ++i) {
      const Rat& x = i < a.c_.size() ? a.c_[i] : kZeroRat();
      const Rat& y = i < b.c_.size() ? b.c_[i] : kZeroRat();
      if (x != y) return false;
    }
    return true;
  }
  friend bool operator!=(const Cyc& a, const Cyc& b) { return !(a == b); }

  // Basis coefficient accessor (0 <= k < field_degree(q)).
  Rat coeff(size_t k) const { return k < c_.size() ? c_[k] : Rat(0); }

  std::string to_string() const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (size_t k = 0; k < c_.size(); ++k) {
      if (c_[k] == 0) continue;
      if (!first) os << (c_[k] > 0 ? " + " : " - ");
      const Rat mag = (!first && c_[k] < 0) ? Rat(-c_[k]) : c_[k];
      if (k == 0) {
        os << mag;
      } else {
        std::string root = (q_ == 2) ? "i" : "zeta";
        if (mag != 1 && mag != -1) os << mag << "*";
        else if (first && mag == -1) os << "-";
        os << root;
        if (q_ != 2 && k > 1) os << "^" << k;
      }
      first = false;
    }
    return os.str();
  }
  friend std::ostream& operator<<(std::ostream& os, const Cyc& c) {
    return os << c.to_string();
  }

 private:
  static const Rat& kZeroRat() {
    static const Rat z(0);
    return z;
  }
  void check_q(const Cyc& o) const {
    if (q_ != o.q_)
      throw ConsistencyError("mixing cyclotomic fields for q=" +
                             std::to_string(q_) + " and q=" + std::to_string(o.q_));
  }
  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }

  uint32_t q_;
  // Coefficients over the power basis of the field generator; trailing zeros
  // trimmed so plain rationals stay in the inline slot.
  boost::container::small_vector<Rat, 1> c_;
};

}  // namespace qwe

#pragma once

// Exact algebra of the generalized Pauli (shift-and-clock) error basis.
//
// Per site the basis is {X^a Z^b : a, b in Z_q} with Z X = zeta X Z,
// zeta = e^{2 pi i / q}.  A PauliString holds the exponent vectors (x, z) of
// the X-before-Z normal form; a PhasedPauli adds a global phase tau^p with
// tau = e^{2 pi i / (4q)} (p mod 4q).  All products, adjoints and conjugates
// are computed exactly in these exponents.
//
// Canonical (Hermitian-friendly) representative of an unsigned string: for
// q = 2 every site with x = z = 1 contributes a factor i (so the site
// operator is Y = i XZ); for odd q the plain X^a Z^b with phase 0.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qwe/cyclotomic.hpp"
#include "qwe/errors.hpp"

namespace qwe {

inline uint32_t check_prime_q(uint32_t q) {
  if (q < 2) throw ValidationError("local dimension q must be >= 2");
  for (uint32_t d = 2; d * d <= q; ++d)
    if (q % d == 0)
      throw ValidationError("local dimension q=" + std::to_string(q) +
                            " is not prime (only prime q is supported)");
  return q;
}

struct PauliString {
  uint32_t q = 2;
  std::vector<uint8_t> x, z;  // exponents mod q, one per site

  PauliString() = default;
  PauliString(uint32_t q_, size_t n) : q(q_), x(n, 0), z(n, 0) {}

  size_t n() const { return x.size(); }
  static PauliString identity(uint32_t q, size_t n) { return PauliString(q, n); }

  bool is_identity() const {
    for (size_t i = 0; i < x.size(); ++i)
      if (x[i] || z[i]) return false;
    return true;
  }

  friend bool operator==(const PauliString& a, const PauliString& b) {
    return a.q == b.q && a.x == b.x && a.z == b.z;
  }
  friend bool operator!=(const PauliString& a, const PauliString& b) {
    return !(a == b);
  }
  friend bool operator<(const PauliString& a, const PauliString& b) {
    if (a.x != b.x) return a.x < b.x;
    return a.z < b.z;
  }
};

inline size_t weight(const PauliString& p) {
  size_t w = 0;
  for (size_t i = 0; i < p.n(); ++i) w += (p.x[i] || p.z[i]);
  return w;
}
inline size_t weight_x(const PauliString& p) {
  size_t w = 0;
  for (auto a : p.x) w += (a != 0);
  return w;
}
inline size_t weight_z(const PauliString& p) {
  size_t w = 0;
  for (auto b : p.z) w += (b != 0);
  return w;
}

inline void check_compatible(const PauliString& a, const PauliString& b) {
  if (a.q != b.q)
    throw ValidationError("Pauli local dimensions differ: " + std::to_string(a.q) +
                          " vs " + std::to_string(b.q));
  if (a.n() != b.n())
    throw ValidationError("Pauli lengths differ: " + std::to_string(a.n()) +
                          " vs " + std::to_string(b.n()));
}

// Unsigned product (exponent sums mod q).
inline PauliString mul_unsigned(const PauliString& a, const PauliString& b) {
  check_compatible(a, b);
  PauliString out(a.q, a.n());
  for (size_t i = 0; i < a.n(); ++i) {
    out.x[i] = static_cast<uint8_t>((a.x[i] + b.x[i]) % a.q);
    out.z[i] = static_cast<uint8_t>((a.z[i] + b.z[i]) % a.q);
  }
  return out;
}

// Unsigned inverse: exponents negated mod q.
inline PauliString neg_unsigned(const PauliString& a) {
  PauliString out(a.q, a.n());
  for (size_t i = 0; i < a.n(); ++i) {
    out.x[i] = static_cast<uint8_t>((a.q - a.x[i]) % a.q);
    out.z[i] = static_cast<uint8_t>((a.q - a.z[i]) % a.q);
  }
  return out;
}

// Commutation exponent: E F = zeta^{omega_exp(E,F)} F E,
// omega(X^a Z^a', X^b Z^b') = zeta^{a'.b - a.b'}.
inline uint32_t omega_exp(const PauliString& a, const PauliString& b) {
  check_compatible(a, b);
  uint64_t s = 0;
  for (size_t i = 0; i < a.n(); ++i) {
    s += static_cast<uint64_t>(a.z[i]) * b.x[i] % a.q;
    s += static_cast<uint64_t>(a.q) - static_cast<uint64_t>(a.x[i]) * b.z[i] % a.q;
  }
  return static_cast<uint32_t>(s % a.q);
}

inline PauliString tensor(const PauliString& a, const PauliString& b) {
  if (a.q != b.q) throw ValidationError("tensor: local dimensions differ");
  PauliString out = a;
  out.x.insert(out.x.end(), b.x.begin(), b.x.end());
  out.z.insert(out.z.end(), b.z.begin(), b.z.end());
  return out;
}

inline PauliString restrict_to(const PauliString& p, const std::vector<size_t>& sites) {
  PauliString out(p.q, sites.size());
  for (size_t i = 0; i < sites.size(); ++i) {
    out.x[i] = p.x.at(sites[i]);
    out.z[i] = p.z.at(sites[i]);
  }
  return out;
}

struct PhasedPauli {
  PauliString u;
  uint32_t phase = 0;  // exponent of tau = e^{2 pi i/(4q)}, reduced mod 4q

  PhasedPauli() = default;
  explicit PhasedPauli(PauliString s, int64_t p = 0) : u(std::move(s)) {
    set_phase(p);
  }
  uint32_t q() const { return u.q; }
  size_t n() const { return u.n(); }
  void set_phase(int64_t p) {
    const int64_t m = 4 * static_cast<int64_t>(u.q);
    p %= m;
    if (p < 0) p += m;
    phase = static_cast<uint32_t>(p);
  }
  bool is_identity() const { return phase == 0 && u.is_identity(); }

  friend bool operator==(const PhasedPauli& a, const PhasedPauli& b) {
    return a.phase == b.phase && a.u == b.u;
  }
  friend bool operator!=(const PhasedPauli& a, const PhasedPauli& b) {
    return !(a == b);
  }
};

inline PhasedPauli identity_op(uint32_t q, size_t n) {
  return PhasedPauli(PauliString(q, n), 0);
}

// Normal-form product: phases pick up zeta^{z_A . x_B} from moving the Z part
// of A across the X part of B (zeta = tau^4).
inline PhasedPauli mul(const PhasedPauli& a, const PhasedPauli& b) {
  check_compatible(a.u, b.u);
  const uint32_t q = a.q();
  uint64_t cross = 0;
  for (size_t i = 0; i < a.n(); ++i)
    cross += static_cast<uint64_t>(a.u.z[i]) * b.u.x[i] % q;
  PhasedPauli out(mul_unsigned(a.u, b.u));
  out.set_phase(static_cast<int64_t>(a.phase) + b.phase +
                4 * static_cast<int64_t>(cross % q));
  return out;
}

// (tau^p Prod X^a Z^b)^dagger = tau^{-p} Prod zeta^{a b} X^{-a} Z^{-b}.
inline PhasedPauli dagger(const PhasedPauli& a) {
  const uint32_t q = a.q();
  uint64_t s = 0;
  for (size_t i = 0; i < a.n(); ++i)
    s += static_cast<uint64_t>(a.u.x[i]) * a.u.z[i] % q;
  PhasedPauli out(neg_unsigned(a.u));
  out.set_phase(-static_cast<int64_t>(a.phase) + 4 * static_cast<int64_t>(s % q));
  return out;
}

// Entrywise complex conjugate: X* = X, Z* = Z^{-1}, phase negated.
inline PhasedPauli conj_star(const PhasedPauli& a) {
  const uint32_t q = a.q();
  PhasedPauli out(a.u);
  for (size_t i = 0; i < a.n(); ++i)
    out.u.z[i] = static_cast<uint8_t>((q - a.u.z[i]) % q);
  out.set_phase(-static_cast<int64_t>(a.phase));
  return out;
}

inline PauliString conj_star_unsigned(const PauliString& a) {
  PauliString out = a;
  for (size_t i = 0; i < a.n(); ++i)
    out.z[i] = static_cast<uint8_t>((a.q - a.z[i]) % a.q);
  return out;
}

// Transpose = conj(dagger): X -> X^{-1}, Z fixed, phase p - zeta^{x.z} part.
inline PhasedPauli transpose(const PhasedPauli& a) {
  return conj_star(dagger(a));
}

inline PhasedPauli pow(const PhasedPauli& a, uint64_t e) {
  PhasedPauli acc = identity_op(a.q(), a.n());
  for (uint64_t i = 0; i < e; ++i) acc = mul(acc, a);
  return acc;
}

// Tr(A^dagger B)/q^n: zero unless unsigned parts are equal, else tau^{pB-pA}.
inline std::optional<int64_t> trace_inner_phase(const PhasedPauli& a,
                                                const PhasedPauli& b) {
  check_compatible(a.u, b.u);
  if (!(a.u == b.u)) return std::nullopt;
  return static_cast<int64_t>(b.phase) - static_cast<int64_t>(a.phase);
}

inline Cyc trace_inner(const PhasedPauli& a, const PhasedPauli& b) {
  auto p = trace_inner_phase(a, b);
  if (!p) return Cyc::zero(a.q());
  return Cyc::root_of_unity(a.q(), *p);
}

// Phase exponent of the canonical (Hermitian for q=2) representative of an
// unsigned string: tau^2 = i per Y site when q = 2, zero otherwise.
inline uint32_t canonical_phase(const PauliString& u) {
  if (u.q != 2) return 0;
  uint32_t ycount = 0;
  for (size_t i = 0; i < u.n(); ++i) ycount += (u.x[i] && u.z[i]);
  return (2 * ycount) % 8;
}

inline PhasedPauli canonical_rep(const PauliString& u) {
  return PhasedPauli(u, canonical_phase(u));
}

// ---- text form ----------------------------------------------------------
// q = 2: one letter per site over {I,X,Z,Y}; Y denotes the canonical i XZ.
// q > 2: per-site tokens "I", "X<a>", "Z<b>" or "X<a>Z<b>".  A "Z" directly
// after an "X" token binds to the same site, so a '.' (or whitespace) marks
// an explicit site boundary: "X2.Z1" is two sites where "X2Z1" is one.
// Optional leading phase token: q=2 {+1,-1,+i,-i}; general "w<k>" for zeta^k.

inline PauliString parse_pauli_string(const std::string& s, uint32_t q,
                                      uint32_t* canonical_phase_out = nullptr) {
  check_prime_q(q);
  PauliString out(q, 0);
  size_t i = 0;
  auto read_int = [&](const char* what) -> uint32_t {
    if (i >= s.size() || !isdigit(static_cast<unsigned char>(s[i])))
      throw ValidationError(std::string("expected digits after ") + what +
                            " in Pauli string '" + s + "' at position " +
                            std::to_string(i));
    uint64_t v = 0;
    while (i < s.size() && isdigit(static_cast<unsigned char>(s[i]))) {
      v = v * 10 + (s[i] - '0');
      if (v > 100000) throw ValidationError("exponent overflow in '" + s + "'");
      ++i;
    }
    return static_cast<uint32_t>(v % q);
  };
  while (i < s.size()) {
    char c = s[i];
    if (c == '.' || isspace(static_cast<unsigned char>(c))) { ++i; continue; }
    uint32_t a = 0, b = 0;
    if (c == 'I') {
      ++i;
    } else if (q == 2 && (c == 'X' || c == 'Z' || c == 'Y') &&
               (i + 1 >= s.size() || !isdigit(static_cast<unsigned char>(s[i + 1])))) {
      a = (c == 'X' || c == 'Y') ? 1 : 0;
      b = (c == 'Z' || c == 'Y') ? 1 : 0;
      ++i;
    } else if (c == 'X' || c == 'Z') {
      if (c == 'X') {
        ++i;
        a = read_int("X");
        if (i < s.size() && s[i] == 'Z') {
          ++i;
          b = read_int("Z");
        }
      } else {
        ++i;
        b = read_int("Z");
      }
    } else {
      throw ValidationError("unexpected character '" + std::string(1, c) +
                            "' in Pauli string '" + s + "'");
    }
    out.x.push_back(static_cast<uint8_t>(a));
    out.z.push_back(static_cast<uint8_t>(b));
  }
  if (canonical_phase_out) *canonical_phase_out = canonical_phase(out);
  return out;
}

// Parses a phase token into a tau-exponent (mod 4q).
inline int64_t parse_phase_token(const std::string& tok, uint32_t q) {
  if (tok.empty() || tok == "+1" || tok == "1" || tok == "+") return 0;
  if (tok == "-1" || tok == "-") return 2 * static_cast<int64_t>(q);
  if (q == 2) {
    if (tok == "+i" || tok == "i") return 2;
    if (tok == "-i") return 6;
  }
  if (tok.size() >= 2 && tok[0] == 'w') {
    try {
      long k = std::stol(tok.substr(1));
      return 4 * static_cast<int64_t>(((k % q) + q) % q);
    } catch (const std::exception&) {
      throw ValidationError("bad phase token '" + tok + "'");
    }
  }
  throw ValidationError("bad phase token '" + tok + "' for q=" + std::to_string(q));
}

// Full operator parse: the canonical phase of the letters (q=2 Y sites)
// is part of the operator, multiplied by the explicit phase token.
inline PhasedPauli parse_phased_pauli(const std::string& phase_tok,
                                      const std::string& paulis, uint32_t q) {
  PauliString u = parse_pauli_string(paulis, q);
  PhasedPauli out(u);
  out.set_phase(parse_phase_token(phase_tok, q) + canonical_phase(u));
  return out;
}

inline std::string pauli_string_to_text(const PauliString& p) {
  std::string s;
  bool bare_x = false;  // previous site printed as X-only
  for (size_t i = 0; i < p.n(); ++i) {
    const uint32_t a = p.x[i], b = p.z[i];
    if (p.q == 2) {
      s += (a && b) ? 'Y' : a ? 'X' : b ? 'Z' : 'I';
    } else if (!a && !b) {
      s += 'I';
      bare_x = false;
    } else {
      // A Z token would bind to a preceding bare X, so split the sites.
      if (!a && bare_x) s += '.';
      if (a) s += "X" + std::to_string(a);
      if (b) s += "Z" + std::to_string(b);
      bare_x = a && !b;
    }
  }
  return s;
}

// Phase token of the operator relative to the canonical representative of
// its unsigned part (so parse(to_text(P)) == P).
inline std::string phased_pauli_to_text(const PhasedPauli& p) {
  const uint32_t q = p.q();
  int64_t rel = static_cast<int64_t>(p.phase) - canonical_phase(p.u);
  rel %= 4 * static_cast<int64_t>(q);
  if (rel < 0) rel += 4 * q;
  std::string tok;
  if (rel == 0) {
    tok = "+1";
  } else if (rel == 2 * q) {
    tok = "-1";
  } else if (q == 2 && rel == 2) {
    tok = "+i";
  } else if (q == 2 && rel == 6) {
    tok = "-i";
  } else if (rel % 4 == 0) {
    tok = "w" + std::to_string(rel / 4);
  } else {
    tok = "t" + std::to_string(rel);  // non-canonical phase; debug only
  }
  return tok + " " + pauli_string_to_text(p.u);
}

struct PauliStringHash {
  size_t operator()(const PauliString& p) const {
    size_t h = std::hash<uint32_t>()(p.q);
    auto mix = [&h](uint8_t v) {
      h ^= static_cast<size_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    };
    for (auto v : p.x) mix(v);
    mix(0xff);
    for (auto v : p.z) mix(v);
    return h;
  }
};

}  // namespace qwe

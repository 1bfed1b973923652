#pragma once

// MacWilliams-type transforms for the four shipped weight schemes, the
// generic single-site transform condition checker, and the scheme-collapse
// maps relating the schemes to one another.
//
// Each transform is a linear change of variables Phi such that the type-B
// enumerator equals the type-A enumerator evaluated at Phi(variables).  The
// transforms act on raw-convention enumerators; in the count convention the
// scalar identity picks up a factor q^k (count_b = q^k * count_a o Phi).

#include <cstdint>
#include <vector>

#include "qwe/enum_poly.hpp"
#include "qwe/errors.hpp"
#include "qwe/pauli.hpp"

namespace qwe {

// A linear change of variables for a particular weight scheme.  forms[v] is
// the image of homogeneous variable v.
struct MWTransform {
  WeightScheme scheme;
  std::vector<LinForm> forms;
};

// The shipped transform for each scheme.
//
// shor-laflamme: w -> (w + (q^2-1) z)/q,       z -> (w - z)/q
// double:        w -> (y + (q-1) x)/sqrt(q),   x -> (w - z)/sqrt(q),
//                y -> (w + (q-1) z)/sqrt(q),   z -> (y - x)/sqrt(q)
// refined:       x_a -> (1/sqrt(q)) sum_d zeta^{-ad} z_d,
//                z_b -> (1/sqrt(q)) sum_c zeta^{+bc} x_c
// complete:      u_{ab} -> (1/q) sum_{c,d} zeta^{bc-ad} u_{cd}
//
// The zeta exponents realize the conjugation phase E^dagger D E = w(D,E) D
// with w(X^aZ^b, X^cZ^d) = zeta^{bc-ad} fixed by Z X = zeta X Z; the checker
// below validates the whole table against exact products of basis elements.
inline MWTransform mw_transform(const WeightScheme& scheme) {
  const uint32_t q = scheme.q;
  const int64_t qs = static_cast<int64_t>(q);
  MWTransform t;
  t.scheme = scheme;
  auto c = [&](int64_t v) { return Cyc(q, Rat(v)); };
  switch (scheme.kind) {
    case SchemeKind::shor_laflamme: {
      t.forms.push_back(LinForm{2, {{0, c(1)}, {1, c(qs * qs - 1)}}});
      t.forms.push_back(LinForm{2, {{0, c(1)}, {1, c(-1)}}});
      break;
    }
    case SchemeKind::double_: {
      // Variable order (w, x, y, z).
      t.forms.push_back(LinForm{1, {{2, c(1)}, {1, c(qs - 1)}}});
      t.forms.push_back(LinForm{1, {{0, c(1)}, {3, c(-1)}}});
      t.forms.push_back(LinForm{1, {{0, c(1)}, {3, c(qs - 1)}}});
      t.forms.push_back(LinForm{1, {{2, c(1)}, {1, c(-1)}}});
      break;
    }
    case SchemeKind::refined_double: {
      // Variables x_0..x_{q-1}, z_0..z_{q-1}.
      for (uint32_t a = 0; a < q; ++a) {
        LinForm f{1, {}};
        for (uint32_t d = 0; d < q; ++d)
          f.coeffs.push_back({q + d, Cyc::zeta_pow(q, -static_cast<int64_t>(a) * d)});
        t.forms.push_back(std::move(f));
      }
      for (uint32_t b = 0; b < q; ++b) {
        LinForm f{1, {}};
        for (uint32_t cidx = 0; cidx < q; ++cidx)
          f.coeffs.push_back({cidx, Cyc::zeta_pow(q, static_cast<int64_t>(b) * cidx)});
        t.forms.push_back(std::move(f));
      }
      break;
    }
    case SchemeKind::complete: {
      // Variable u_{ab} at index a*q + b.
      for (uint32_t a = 0; a < q; ++a)
        for (uint32_t b = 0; b < q; ++b) {
          LinForm f{2, {}};
          for (uint32_t cc = 0; cc < q; ++cc)
            for (uint32_t d = 0; d < q; ++d)
              f.coeffs.push_back(
                  {cc * q + d,
                   Cyc::zeta_pow(q, static_cast<int64_t>(b) * cc -
                                        static_cast<int64_t>(a) * d)});
          t.forms.push_back(std::move(f));
        }
      break;
    }
  }
  return t;
}

namespace detail {

inline void check_scheme(const EnumPoly& p, SchemeKind kind, uint32_t q,
                         const char* what) {
  if (p.scheme().kind != kind || p.scheme().q != q)
    throw ValidationError(std::string(what) + ": polynomial has scheme " +
                          scheme_kind_name(p.scheme().kind) + " over q=" +
                          std::to_string(p.scheme().q));
  if (!p.homogeneous())
    throw ValidationError(std::string(what) +
                          ": transform requires the homogeneous form");
}

// Checks that every term has the scheme's per-site block degrees equal to n:
// scalar (w,z): total degree n; double: deg(x,y) = deg(w,z) = n; refined:
// deg(x-block) = deg(z-block) = n; complete: total degree n.
inline void check_block_degrees(const EnumPoly& p, int n, const char* what) {
  const WeightScheme& s = p.scheme();
  for (const auto& [key, coeff] : p.terms()) {
    (void)coeff;
    std::vector<uint64_t> e = p.packing().unpack(key);
    bool ok = true;
    switch (s.kind) {
      case SchemeKind::shor_laflamme:
      case SchemeKind::complete: {
        uint64_t tot = 0;
        for (uint64_t v : e) tot += v;
        ok = tot == static_cast<uint64_t>(n);
        break;
      }
      case SchemeKind::double_: {
        ok = e[1] + e[2] == static_cast<uint64_t>(n) &&
             e[0] + e[3] == static_cast<uint64_t>(n);
        break;
      }
      case SchemeKind::refined_double: {
        uint64_t dx = 0, dz = 0;
        for (uint32_t v = 0; v < s.q; ++v) dx += e[v];
        for (uint32_t v = s.q; v < 2 * s.q; ++v) dz += e[v];
        ok = dx == static_cast<uint64_t>(n) && dz == static_cast<uint64_t>(n);
        break;
      }
    }
    if (!ok)
      throw ValidationError(std::string(what) + ": term is not homogeneous of " +
                            "site degree " + std::to_string(n));
  }
}

inline void check_rational_coefficients(const EnumPoly& p, const char* what) {
  for (const auto& [key, coeff] : p.terms()) {
    (void)key;
    if (!coeff.is_rational())
      throw ValidationError(std::string(what) +
                            ": transform produced a non-rational coefficient (" +
                            coeff.to_string() +
                            "); input is not a valid enumerator");
  }
}

}  // namespace detail

// Shor-Laflamme transform of a homogeneous degree-n polynomial in (w, z).
inline EnumPoly mw_scalar(const EnumPoly& a, int n, uint32_t q) {
  detail::check_scheme(a, SchemeKind::shor_laflamme, q, "mw_scalar");
  detail::check_block_degrees(a, n, "mw_scalar");
  return a.substitute_linear(mw_transform(a.scheme()).forms);
}

// Double transform of a bidegree-(n, n) polynomial in (w, x, y, z).
inline EnumPoly mw_double(const EnumPoly& cpoly, int n, uint32_t q) {
  detail::check_scheme(cpoly, SchemeKind::double_, q, "mw_double");
  detail::check_block_degrees(cpoly, n, "mw_double");
  return cpoly.substitute_linear(mw_transform(cpoly.scheme()).forms);
}

// Refined-double transform; enumerator-valued inputs must come back rational.
inline EnumPoly mw_refined_double(const EnumPoly& e, int n, uint32_t q) {
  detail::check_scheme(e, SchemeKind::refined_double, q, "mw_refined_double");
  detail::check_block_degrees(e, n, "mw_refined_double");
  EnumPoly out = e.substitute_linear(mw_transform(e.scheme()).forms);
  detail::check_rational_coefficients(out, "mw_refined_double");
  return out;
}

// Complete transform; enumerator-valued inputs must come back rational.
inline EnumPoly mw_complete(const EnumPoly& e, int n, uint32_t q) {
  detail::check_scheme(e, SchemeKind::complete, q, "mw_complete");
  detail::check_block_degrees(e, n, "mw_complete");
  EnumPoly out = e.substitute_linear(mw_transform(e.scheme()).forms);
  detail::check_rational_coefficients(out, "mw_complete");
  return out;
}

// Applies a named scheme's transform with the scheme-appropriate checks.
inline EnumPoly apply_mw(const EnumPoly& p, int n) {
  switch (p.scheme().kind) {
    case SchemeKind::shor_laflamme: return mw_scalar(p, n, p.scheme().q);
    case SchemeKind::double_: return mw_double(p, n, p.scheme().q);
    case SchemeKind::refined_double:
      return mw_refined_double(p, n, p.scheme().q);
    case SchemeKind::complete: return mw_complete(p, n, p.scheme().q);
  }
  throw ValidationError("apply_mw: unknown scheme");
}

// Single coefficient of the scalar transform image without expanding the full
// substitution: for input sum_d a_d w^{n-d} z^d the image's z^e coefficient is
//   q^{-n} sum_d a_d sum_j C(n-d, j) (q^2-1)^j C(d, e-j) (-1)^{e-j}.
// Exact integer arithmetic; used for large n where only low-weight image
// coefficients are needed (e.g. distance scans).
inline Rat mw_scalar_coefficient(const std::vector<Rat>& a_by_degree, int n,
                                 uint32_t q, int e) {
  if (static_cast<int>(a_by_degree.size()) != n + 1)
    throw ValidationError("mw_scalar_coefficient: need n+1 coefficients");
  auto binom = [](int64_t m, int64_t r) -> BigInt {
    if (r < 0 || r > m) return BigInt(0);
    BigInt v(1);
    for (int64_t i = 0; i < r; ++i) { v *= (m - i); v /= (i + 1); }
    return v;
  };
  const BigInt qq1 = BigInt(q) * q - 1;
  Rat total(0);
  for (int d = 0; d <= n; ++d) {
    if (a_by_degree[d] == 0) continue;
    BigInt k(0);
    BigInt pow_qq1(1);
    for (int j = 0; j <= e; ++j) {
      BigInt term = binom(n - d, j) * pow_qq1 * binom(d, e - j);
      if ((e - j) % 2 != 0) term = -term;
      k += term;
      pow_qq1 *= qq1;
    }
    total += a_by_degree[d] * Rat(k);
  }
  BigInt qn(1);
  for (int i = 0; i < n; ++i) qn *= q;
  return total / Rat(qn);
}

// Verifies the single-site transform condition for a scalar weight function:
// for every ordered pair (D, D') of canonical basis elements,
//   Phi(u)^{wt(D,D')} = (1/q^2) sum_{E,E'} Tr(E^dagger D E' D'^dagger)
//                                u^{wt(E,E')},
// where wt(E,E') is undefined off the diagonal and u^{undefined} = 0.  The
// right-hand side is evaluated with exact Pauli products, so this check
// validates both the transform table and the phase conventions beneath it.
inline bool verify_phi_condition(const WeightScheme& scheme,
                                 const MWTransform& phi) {
  const uint32_t q = scheme.q;
  if (phi.scheme != scheme) return false;
  if (phi.forms.size() != scheme.num_vars(true)) return false;

  std::vector<PhasedPauli> basis;
  basis.reserve(q * q);
  for (uint32_t a = 0; a < q; ++a)
    for (uint32_t b = 0; b < q; ++b) {
      PauliString u(q, 1);
      u.x[0] = static_cast<uint8_t>(a);
      u.z[0] = static_cast<uint8_t>(b);
      basis.push_back(canonical_rep(u));
    }

  const uint32_t nv = scheme.num_vars(true);
  std::vector<uint64_t> exps(nv);
  std::vector<std::pair<uint32_t, uint32_t>> incs;
  auto monomial_exps = [&](const PhasedPauli& P) {
    std::fill(exps.begin(), exps.end(), 0);
    scheme.site_exponents(P.u.x[0], P.u.z[0], true, incs);
    for (const auto& [v, inc] : incs) exps[v] += inc;
  };
  for (const PhasedPauli& D : basis) {
    for (const PhasedPauli& Dp : basis) {
      // RHS: sum over diagonal pairs (E, E); off-diagonal weights are
      // undefined and contribute nothing.
      EnumPoly rhs(scheme, true);
      for (const PhasedPauli& E : basis) {
        PhasedPauli prod = mul(mul(dagger(E), D), mul(E, dagger(Dp)));
        if (!prod.u.is_identity()) continue;
        // Tr(prod) = q * tau^phase; overall coefficient Tr / q^2.
        Cyc coeff = Cyc::root_of_unity(q, prod.phase).scale(Rat(1) / Rat(q));
        monomial_exps(E);
        rhs.add_term(exps, coeff);
      }
      // LHS: Phi applied to the monomial u^{wt(D,D)} when defined, else 0.
      EnumPoly lhs(scheme, true);
      if (D.u == Dp.u) {
        EnumPoly mono(scheme, true);
        monomial_exps(D);
        mono.add_term(exps, Cyc::one(q));
        lhs = mono.substitute_linear(phi.forms);
      }
      if (!(lhs == rhs)) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Scheme collapses.  Each map sends a finer scheme's variables to monomials
// of a coarser scheme's variables, term by term.

namespace detail {

// images[v] lists the target variables (with multiplicity) that replace one
// power of source variable v.
inline EnumPoly collapse_terms(const EnumPoly& src, const WeightScheme& target,
                               const std::vector<std::vector<uint32_t>>& images) {
  EnumPoly out(target, true);
  const uint32_t snv = src.num_vars();
  std::vector<uint64_t> te(target.num_vars(true));
  for (const auto& [key, coeff] : src.terms()) {
    std::vector<uint64_t> se = src.packing().unpack(key);
    std::fill(te.begin(), te.end(), 0);
    for (uint32_t v = 0; v < snv; ++v)
      for (uint32_t tvar : images[v]) te[tvar] += se[v];
    out.add_term(te, coeff);
  }
  return out;
}

}  // namespace detail

// complete -> shor-laflamme: u_I -> w, u_{E != I} -> z.
inline EnumPoly collapse_complete_to_scalar(const EnumPoly& e) {
  const uint32_t q = e.scheme().q;
  if (e.scheme().kind != SchemeKind::complete)
    throw ValidationError("collapse_complete_to_scalar: wrong source scheme");
  std::vector<std::vector<uint32_t>> images(q * q);
  for (uint32_t a = 0; a < q; ++a)
    for (uint32_t b = 0; b < q; ++b)
      images[a * q + b] = {(a == 0 && b == 0) ? 0u : 1u};
  return detail::collapse_terms(e, WeightScheme{SchemeKind::shor_laflamme, q},
                                images);
}

// complete -> refined-double: u_{ab} -> x_a z_b.
inline EnumPoly collapse_complete_to_refined(const EnumPoly& e) {
  const uint32_t q = e.scheme().q;
  if (e.scheme().kind != SchemeKind::complete)
    throw ValidationError("collapse_complete_to_refined: wrong source scheme");
  std::vector<std::vector<uint32_t>> images(q * q);
  for (uint32_t a = 0; a < q; ++a)
    for (uint32_t b = 0; b < q; ++b) images[a * q + b] = {a, q + b};
  return detail::collapse_terms(
      e, WeightScheme{SchemeKind::refined_double, q}, images);
}

// refined-double -> double: x_0 -> y, x_{a>0} -> x, z_0 -> w, z_{b>0} -> z.
inline EnumPoly collapse_refined_to_double(const EnumPoly& e) {
  const uint32_t q = e.scheme().q;
  if (e.scheme().kind != SchemeKind::refined_double)
    throw ValidationError("collapse_refined_to_double: wrong source scheme");
  std::vector<std::vector<uint32_t>> images(2 * q);
  for (uint32_t a = 0; a < q; ++a) images[a] = {a == 0 ? 2u : 1u};
  for (uint32_t b = 0; b < q; ++b) images[q + b] = {b == 0 ? 0u : 3u};
  return detail::collapse_terms(e, WeightScheme{SchemeKind::double_, q},
                                images);
}

// complete -> double: u_{ab} -> (a ? x : y)(b ? z : w).
inline EnumPoly collapse_complete_to_double(const EnumPoly& e) {
  const uint32_t q = e.scheme().q;
  if (e.scheme().kind != SchemeKind::complete)
    throw ValidationError("collapse_complete_to_double: wrong source scheme");
  std::vector<std::vector<uint32_t>> images(q * q);
  for (uint32_t a = 0; a < q; ++a)
    for (uint32_t b = 0; b < q; ++b)
      images[a * q + b] = {a == 0 ? 2u : 1u, b == 0 ? 0u : 3u};
  return detail::collapse_terms(e, WeightScheme{SchemeKind::double_, q},
                                images);
}

}  // namespace qwe

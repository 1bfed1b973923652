#pragma once

// Tensor weight enumerators of stabilizer "lego" blocks, and the operations
// used to contract networks of them: tensor products, leg traces (gluing),
// weighted traces down to ordinary polynomials, the dual (Psi) transform, and
// single-site Clifford conjugation.
//
// A rank-m tensor enumerator assigns to each ordered pair (E, E') of m-site
// Pauli strings a polynomial in the active weight scheme's variables; the
// elements E, E' index the open (uncontracted) legs and their own weights are
// *not* folded into the polynomial.  Rank 0 recovers the scalar enumerator.
// Entries are stored sparsely under packed (E, E') byte keys with exact
// cyclotomic coefficients, so every contraction identity holds exactly.
//
// Normalization is deferred: building blocks use the count convention (the
// (I, I) entry of a freshly built block has constant term 1), traces introduce
// no scalar factors, and a finished contraction is rescaled once at the end
// via normalize_identity().

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qwe/enum_poly.hpp"
#include "qwe/errors.hpp"
#include "qwe/macwilliams.hpp"
#include "qwe/pauli.hpp"
#include "qwe/scalar_enum.hpp"
#include "qwe/stab_group.hpp"

namespace qwe {

// ---- lego blocks -----------------------------------------------------------

// A stabilizer group fragment whose sites carry unique leg labels.  Logical
// legs of an encoding state are ordinary sites here; any number of logical
// qudits is allowed.
struct LegoBlock {
  StabilizerGroup group;
  std::vector<std::string> legs;  // one label per site, all distinct
};

// ---- tensor enumerator -----------------------------------------------------

// Packed (E, E') key: [E.x | E.z | E'.x | E'.z], each segment rank() bytes.
using PairKey = std::vector<uint8_t>;

struct TensorEnumerator {
  WeightScheme scheme{SchemeKind::shor_laflamme, 2};
  std::vector<std::string> open_legs;        // site order of E, E'
  std::map<PairKey, EnumPoly> entries;       // no zero polynomials stored

  uint32_t q() const { return scheme.q; }
  size_t rank() const { return open_legs.size(); }

  friend bool operator==(const TensorEnumerator& a, const TensorEnumerator& b) {
    return a.scheme == b.scheme && a.open_legs == b.open_legs &&
           a.entries == b.entries;
  }
};

namespace detail {

inline PairKey make_pair_key(const PauliString& e, const PauliString& ep) {
  PairKey k;
  k.reserve(4 * e.n());
  k.insert(k.end(), e.x.begin(), e.x.end());
  k.insert(k.end(), e.z.begin(), e.z.end());
  k.insert(k.end(), ep.x.begin(), ep.x.end());
  k.insert(k.end(), ep.z.begin(), ep.z.end());
  return k;
}

inline std::pair<PauliString, PauliString> split_pair_key(const PairKey& k,
                                                          uint32_t q) {
  const size_t m = k.size() / 4;
  PauliString e(q, m), ep(q, m);
  for (size_t i = 0; i < m; ++i) {
    e.x[i] = k[i];
    e.z[i] = k[m + i];
    ep.x[i] = k[2 * m + i];
    ep.z[i] = k[3 * m + i];
  }
  return {std::move(e), std::move(ep)};
}

// Accumulate into entries[key], creating the polynomial lazily and dropping
// it again if the addition cancelled to zero.
inline void add_entry_term(TensorEnumerator& t, const PairKey& key,
                           uint64_t mono, const Cyc& c) {
  auto [it, fresh] =
      t.entries.try_emplace(key, EnumPoly(t.scheme, /*homogeneous=*/true));
  (void)fresh;
  it->second.add_term_key(mono, c);
  if (it->second.is_zero()) t.entries.erase(it);
}

inline void add_entry_poly(TensorEnumerator& t, const PairKey& key,
                           const EnumPoly& p, uint64_t mono_shift,
                           const Cyc& c) {
  auto [it, fresh] =
      t.entries.try_emplace(key, EnumPoly(t.scheme, /*homogeneous=*/true));
  (void)fresh;
  it->second.accumulate_scaled(p, mono_shift, c);
  if (it->second.is_zero()) t.entries.erase(it);
}

inline size_t leg_position(const TensorEnumerator& t, const std::string& leg) {
  auto it = std::find(t.open_legs.begin(), t.open_legs.end(), leg);
  if (it == t.open_legs.end())
    throw ValidationError("unknown open leg '" + leg + "'");
  return static_cast<size_t>(it - t.open_legs.begin());
}

// Total degree contributed by one closed site under every shipped scheme is
// exactly 1, so the number of closed sites a polynomial tracks equals the
// per-site degree total of any of its monomials.
inline size_t closed_site_count(const EnumPoly& p) {
  if (p.is_zero()) return 0;
  const auto exps = p.packing().unpack(p.terms().begin()->first);
  const WeightScheme& s = p.scheme();
  uint64_t total = 0;
  switch (s.kind) {
    case SchemeKind::shor_laflamme:
    case SchemeKind::complete:
      for (uint64_t e : exps) total += e;
      break;
    case SchemeKind::double_:
      total = exps[1] + exps[2];  // x + y grade one per site
      break;
    case SchemeKind::refined_double:
      for (uint32_t v = 0; v < s.q; ++v) total += exps[v];
      break;
  }
  return static_cast<size_t>(total);
}

}  // namespace detail

// ---- construction ----------------------------------------------------------

// Build the tensor enumerator of a lego block with the named legs kept open.
// Closed (traced-out in the polynomial sense: weight-tracked) legs contribute
// scheme monomials; open legs index the tensor entries.  The result follows
// the count convention: the (I, I) entry has constant term 1.
inline TensorEnumerator from_lego(
    const LegoBlock& block, const std::vector<std::string>& tensor_legs,
    const WeightScheme& scheme,
    uint64_t group_cap = StabilizerGroup::kDefaultGroupCap) {
  const StabilizerGroup& g = block.group;
  const uint32_t q = g.q();
  if (scheme.q != q)
    throw ValidationError("weight scheme qudit dimension does not match lego");
  if (block.legs.size() != g.n())
    throw ValidationError("lego needs exactly one leg label per site");
  {
    std::set<std::string> uniq(block.legs.begin(), block.legs.end());
    if (uniq.size() != block.legs.size())
      throw ValidationError("lego leg labels must be distinct");
  }

  // Open sites in site order; remaining sites are closed.
  std::vector<size_t> open_sites, closed_sites;
  {
    std::set<std::string> want(tensor_legs.begin(), tensor_legs.end());
    if (want.size() != tensor_legs.size())
      throw ValidationError("duplicate tensor leg requested");
    for (size_t i = 0; i < block.legs.size(); ++i) {
      if (want.count(block.legs[i])) {
        open_sites.push_back(i);
        want.erase(block.legs[i]);
      } else {
        closed_sites.push_back(i);
      }
    }
    if (!want.empty())
      throw ValidationError("tensor leg '" + *want.begin() +
                            "' is not a leg of this lego");
  }

  TensorEnumerator t;
  t.scheme = scheme;
  for (size_t s : open_sites) t.open_legs.push_back(block.legs[s]);

  const EnumPoly proto(scheme, /*homogeneous=*/true);
  detail::check_site_totals(proto.packing(), closed_sites.size());
  const std::vector<uint64_t> table = detail::site_key_table(scheme, proto.packing());

  const std::vector<PhasedPauli> elems = g.elements(group_cap);

  // Bucket group elements by their closed-leg restriction so the pair loop
  // only visits pairs whose closed parts cancel.
  auto closed_bytes = [&](const PauliString& u) {
    std::vector<uint8_t> b;
    b.reserve(2 * closed_sites.size());
    for (size_t s : closed_sites) b.push_back(u.x[s]);
    for (size_t s : closed_sites) b.push_back(u.z[s]);
    return b;
  };
  std::map<std::vector<uint8_t>, std::vector<size_t>> buckets;
  for (size_t i = 0; i < elems.size(); ++i)
    buckets[closed_bytes(elems[i].u)].push_back(i);

  for (const PhasedPauli& s1 : elems) {
    // Phase of s1 relative to the canonical representative of its string.
    const int64_t p1 = static_cast<int64_t>(s1.phase) -
                       static_cast<int64_t>(canonical_rep(s1.u).phase);
    const PauliString closed_part = restrict_to(s1.u, closed_sites);
    const uint64_t mono = detail::monomial_key(closed_part, table, q);
    const PauliString e = restrict_to(s1.u, open_sites);

    // Partners s2 whose closed restriction is the negation of s1's.
    auto it = buckets.find(closed_bytes(neg_unsigned(s1.u)));
    if (it == buckets.end()) continue;
    for (size_t j : it->second) {
      const PhasedPauli& s2 = elems[j];
      const PauliString ns2 = neg_unsigned(s2.u);
      // canonical_rep(ns2) * s2 is the identity string; its phase is the
      // scalar the second trace contributes.
      const PhasedPauli prod = mul(canonical_rep(ns2), s2);
      const int64_t p2 = static_cast<int64_t>(prod.phase);
      const PauliString ep = restrict_to(ns2, open_sites);
      const Cyc coeff = Cyc::root_of_unity(q, p1 + p2);
      detail::add_entry_term(t, detail::make_pair_key(e, ep), mono, coeff);
    }
  }
  return t;
}

// ---- tensor product --------------------------------------------------------

inline TensorEnumerator tensor_product(const TensorEnumerator& t1,
                                       const TensorEnumerator& t2) {
  if (!(t1.scheme == t2.scheme))
    throw ValidationError("tensor factors use different weight schemes");
  {
    std::set<std::string> seen(t1.open_legs.begin(), t1.open_legs.end());
    for (const std::string& l : t2.open_legs)
      if (!seen.insert(l).second)
        throw ValidationError("tensor factors share the leg label '" + l + "'");
  }
  TensorEnumerator out;
  out.scheme = t1.scheme;
  out.open_legs = t1.open_legs;
  out.open_legs.insert(out.open_legs.end(), t2.open_legs.begin(),
                       t2.open_legs.end());
  const uint32_t q = t1.q();
  for (const auto& [k1, p1] : t1.entries) {
    const auto [a, ap] = detail::split_pair_key(k1, q);
    for (const auto& [k2, p2] : t2.entries) {
      const auto [b, bp] = detail::split_pair_key(k2, q);
      EnumPoly prod = p1 * p2;
      if (prod.is_zero()) continue;
      out.entries.emplace(detail::make_pair_key(tensor(a, b), tensor(ap, bp)),
                          std::move(prod));
    }
  }
  return out;
}

// ---- leg traces ------------------------------------------------------------

// Glue two open legs of one tensor (self-traces across what used to be two
// different blocks are the normal case after tensor_product).  The surviving
// entries are those whose element on leg_k is the conjugate (star) of the
// element on leg_j, for E and E' independently; the glued sites disappear
// from the keys.  No scalar factor is introduced: normalization is deferred
// to the end of the contraction.
inline TensorEnumerator trace_legs(const TensorEnumerator& t,
                                   const std::string& leg_j,
                                   const std::string& leg_k) {
  const size_t pj = detail::leg_position(t, leg_j);
  const size_t pk = detail::leg_position(t, leg_k);
  if (pj == pk) throw ValidationError("cannot trace a leg with itself");

  const uint32_t q = t.q();
  TensorEnumerator out;
  out.scheme = t.scheme;
  for (size_t i = 0; i < t.open_legs.size(); ++i)
    if (i != pj && i != pk) out.open_legs.push_back(t.open_legs[i]);

  // Single-site canonical phase (exponent of tau) of the string X^a Z^b.
  auto site_c = [&](uint8_t a, uint8_t b) -> int64_t {
    PauliString u(q, 1);
    u.x[0] = a;
    u.z[0] = b;
    return canonical_phase(u);
  };
  auto conj_ok = [&](const PauliString& u) {
    return u.x[pk] == u.x[pj] &&
           u.z[pk] == static_cast<uint8_t>((q - u.z[pj]) % q);
  };

  std::vector<size_t> keep;
  for (size_t i = 0; i < t.open_legs.size(); ++i)
    if (i != pj && i != pk) keep.push_back(i);

  for (const auto& [key, poly] : t.entries) {
    const auto [e, ep] = detail::split_pair_key(key, q);
    if (!conj_ok(e) || !conj_ok(ep)) continue;
    // tau exponent: + for the E pair of glued sites, - for the E' pair.
    const int64_t pexp = site_c(e.x[pj], e.z[pj]) + site_c(e.x[pk], e.z[pk]) -
                         site_c(ep.x[pj], ep.z[pj]) -
                         site_c(ep.x[pk], ep.z[pk]);
    const Cyc coeff = Cyc::root_of_unity(q, pexp);
    detail::add_entry_poly(out, detail::make_pair_key(restrict_to(e, keep),
                                                      restrict_to(ep, keep)),
                           poly, 0, coeff);
  }
  return out;
}

// ---- weighted trace --------------------------------------------------------

// Reduce the named open legs into the polynomial: entries that are diagonal
// on those legs survive with the legs' scheme monomial multiplied in; the
// rest drop.  Reducing every leg yields the rank-0 scalar enumerator.
inline TensorEnumerator weighted_trace(
    const TensorEnumerator& t, const std::vector<std::string>& legs_to_reduce) {
  const uint32_t q = t.q();
  std::set<size_t> reduce;
  for (const std::string& l : legs_to_reduce)
    if (!reduce.insert(detail::leg_position(t, l)).second)
      throw ValidationError("leg '" + l + "' listed twice");

  TensorEnumerator out;
  out.scheme = t.scheme;
  std::vector<size_t> keep;
  for (size_t i = 0; i < t.open_legs.size(); ++i)
    if (!reduce.count(i)) {
      keep.push_back(i);
      out.open_legs.push_back(t.open_legs[i]);
    }

  const EnumPoly proto(t.scheme, /*homogeneous=*/true);
  const std::vector<uint64_t> table =
      detail::site_key_table(t.scheme, proto.packing());

  for (const auto& [key, poly] : t.entries) {
    const auto [e, ep] = detail::split_pair_key(key, q);
    bool diag = true;
    uint64_t shift = 0;
    for (size_t p : reduce) {
      if (e.x[p] != ep.x[p] || e.z[p] != ep.z[p]) {
        diag = false;
        break;
      }
      shift += table[e.x[p] * q + e.z[p]];
    }
    if (!diag) continue;
    detail::add_entry_poly(out, detail::make_pair_key(restrict_to(e, keep),
                                                      restrict_to(ep, keep)),
                           poly, shift, Cyc::one(q));
  }
  return out;
}

// ---- dual (Psi) transform --------------------------------------------------

inline constexpr size_t kPsiMaxRank = 6;

// Apply the dual transform: the weight-scheme variables transform by the
// ordinary MacWilliams substitution and the tensor indices by the discrete
// Fourier kernel over pairs.  For rank 0 this is exactly the scalar
// MacWilliams transform; for the tensor of a pure stabilizer lego it is the
// identity.
inline TensorEnumerator psi_transform(const TensorEnumerator& t,
                                      size_t max_rank = kPsiMaxRank) {
  const size_t m = t.rank();
  if (m > max_rank)
    throw ResourceError("dual transform of a rank-" + std::to_string(m) +
                        " tensor exceeds the rank cap " +
                        std::to_string(max_rank));
  const uint32_t q = t.q();

  TensorEnumerator out;
  out.scheme = t.scheme;
  out.open_legs = t.open_legs;
  if (t.entries.empty()) return out;

  // Number of weight-tracked sites, needed to sanity-check the substitution.
  const size_t n_closed = detail::closed_site_count(t.entries.begin()->second);

  // 1 / q^m from the index kernel.
  const Rat inv_qm = q_power(q, -static_cast<int>(m));

  uint64_t pair_count = 1;  // q^{2m} strings F
  for (size_t i = 0; i < 2 * m; ++i) pair_count *= q;

  for (const auto& [key, poly] : t.entries) {
    detail::check_block_degrees(poly, static_cast<int>(n_closed),
                                "dual transform input");
    const EnumPoly p2 = poly.substitute_linear(mw_transform(t.scheme).forms);
    if (p2.is_zero()) continue;
    const auto [e, ep] = detail::split_pair_key(key, q);
    const PhasedPauli ce = canonical_rep(e);
    const PhasedPauli cep = canonical_rep(ep);

    PauliString f(q, m), fp(q, m);
    for (uint64_t idx = 0; idx < pair_count; ++idx) {
      uint64_t rem = idx;
      for (size_t s = 0; s < m; ++s) {
        f.x[s] = static_cast<uint8_t>(rem % q);
        rem /= q;
        f.z[s] = static_cast<uint8_t>(rem % q);
        rem /= q;
      }
      // F' = F - E + E' site-wise in exponent space.
      for (size_t s = 0; s < m; ++s) {
        fp.x[s] = static_cast<uint8_t>((f.x[s] + q - e.x[s] + ep.x[s]) % q);
        fp.z[s] = static_cast<uint8_t>((f.z[s] + q - e.z[s] + ep.z[s]) % q);
      }
      const PhasedPauli prod = mul(mul(dagger(canonical_rep(f)), ce),
                                   mul(canonical_rep(fp), dagger(cep)));
      Cyc coeff = Cyc::root_of_unity(q, prod.phase);
      coeff.scale(inv_qm);
      detail::add_entry_poly(out, detail::make_pair_key(f, fp), p2, 0, coeff);
    }
  }
  return out;
}

// ---- single-site Clifford conjugation ---------------------------------------

// A single-qudit Clifford given by its conjugation images of X and Z.
struct SingleSiteClifford {
  PhasedPauli image_x;
  PhasedPauli image_z;
};

// Conjugate the named leg by the Clifford: entries move to the conjugated
// index pair with the phase difference between the conjugated canonical
// representatives multiplied in.
inline TensorEnumerator lambda_clifford(const TensorEnumerator& t,
                                        const std::string& leg,
                                        const SingleSiteClifford& c) {
  const uint32_t q = t.q();
  if (c.image_x.u.q != q || c.image_z.u.q != q)
    throw ValidationError("Clifford images use the wrong qudit dimension");
  if (c.image_x.u.n() != 1 || c.image_z.u.n() != 1)
    throw ValidationError("Clifford images must act on a single site");
  if (!(pow(c.image_x, q) == identity_op(q, 1)) ||
      !(pow(c.image_z, q) == identity_op(q, 1)))
    throw ValidationError("Clifford images must have order dividing q");
  if (omega_exp(c.image_x.u, c.image_z.u) != q - 1)
    throw ValidationError(
        "Clifford images must preserve the X/Z commutation phase");

  const size_t p = detail::leg_position(t, leg);

  // Conjugate the canonical single-site element X^a Z^b; returns the new
  // site exponents and the tau-phase offset relative to canonical.
  auto conjugate_site = [&](uint8_t a, uint8_t b, uint8_t& na, uint8_t& nb) {
    PauliString u(q, 1);
    u.x[0] = a;
    u.z[0] = b;
    PhasedPauli w(PauliString(q, 1), canonical_phase(u));
    for (uint8_t i = 0; i < a; ++i) w = mul(w, c.image_x);
    for (uint8_t i = 0; i < b; ++i) w = mul(w, c.image_z);
    na = w.u.x[0];
    nb = w.u.z[0];
    return static_cast<int64_t>(w.phase) -
           static_cast<int64_t>(canonical_phase(w.u));
  };

  TensorEnumerator out;
  out.scheme = t.scheme;
  out.open_legs = t.open_legs;
  for (const auto& [key, poly] : t.entries) {
    auto [e, ep] = detail::split_pair_key(key, q);
    uint8_t na = 0, nb = 0;
    const int64_t d1 = conjugate_site(e.x[p], e.z[p], na, nb);
    e.x[p] = na;
    e.z[p] = nb;
    const int64_t d2 = conjugate_site(ep.x[p], ep.z[p], na, nb);
    ep.x[p] = na;
    ep.z[p] = nb;
    const Cyc coeff = Cyc::root_of_unity(q, d1 - d2);
    detail::add_entry_poly(out, detail::make_pair_key(e, ep), poly, 0, coeff);
  }
  return out;
}

// ---- inspection and normalization -------------------------------------------

inline bool is_diagonal(const TensorEnumerator& t) {
  for (const auto& [key, poly] : t.entries) {
    (void)poly;
    const size_t m = key.size() / 4;
    for (size_t i = 0; i < 2 * m; ++i)
      if (key[i] != key[2 * m + i]) return false;
  }
  return true;
}

// Keep only the diagonal entries (E, E).
inline TensorEnumerator reduced(const TensorEnumerator& t) {
  TensorEnumerator out;
  out.scheme = t.scheme;
  out.open_legs = t.open_legs;
  for (const auto& [key, poly] : t.entries) {
    const size_t m = key.size() / 4;
    bool diag = true;
    for (size_t i = 0; i < 2 * m && diag; ++i) diag = key[i] == key[2 * m + i];
    if (diag) out.entries.emplace(key, poly);
  }
  return out;
}

// The polynomial of a rank-0 tensor (zero polynomial if empty).
inline EnumPoly scalar_value(const TensorEnumerator& t) {
  if (t.rank() != 0)
    throw ValidationError("scalar_value needs a rank-0 tensor");
  if (t.entries.empty()) return EnumPoly(t.scheme, /*homogeneous=*/true);
  return t.entries.begin()->second;
}

// Entry lookup; returns the zero polynomial when absent.
inline EnumPoly entry_of(const TensorEnumerator& t, const PauliString& e,
                         const PauliString& ep) {
  auto it = t.entries.find(detail::make_pair_key(e, ep));
  if (it == t.entries.end()) return EnumPoly(t.scheme, /*homogeneous=*/true);
  return it->second;
}

// Rescale so the (I, I) entry has constant term 1 (count convention).  A
// contraction that annihilated the state has no such term; that is reported
// as a validation failure because it means the network postselects on an
// impossible outcome.
inline TensorEnumerator normalize_identity(const TensorEnumerator& t) {
  const PairKey id_key(4 * t.rank(), 0);
  auto it = t.entries.find(id_key);
  if (it == t.entries.end())
    throw ValidationError(
        "contraction annihilated the state: identity entry vanished");
  // The zero-weight coefficient of the (I, I) entry: in homogeneous form the
  // weight-0 monomial is the all-identity-sites one, not the all-zero key.
  const EnumPoly& idp = it->second;
  const size_t nc = detail::closed_site_count(idp);
  const std::vector<uint64_t> table =
      detail::site_key_table(t.scheme, idp.packing());
  uint64_t id_mono = 0;
  for (size_t i = 0; i < nc; ++i) id_mono = idp.packing().add(id_mono, table[0]);
  const Cyc c0 = idp.coeff_of(idp.packing().unpack(id_mono));
  if (c0.is_zero())
    throw ValidationError(
        "contraction annihilated the state: identity entry has no constant "
        "term");
  const Rat scale = Rat(1) / c0.as_rational();
  TensorEnumerator out;
  out.scheme = t.scheme;
  out.open_legs = t.open_legs;
  for (const auto& [key, poly] : t.entries) {
    EnumPoly p(t.scheme, /*homogeneous=*/true);
    p.accumulate_scaled(poly, 0, Cyc::one(t.q()).scale(scale));
    if (!p.is_zero()) out.entries.emplace(key, std::move(p));
  }
  return out;
}

// One line per entry: "E | E' | polynomial", keys in deterministic order.
inline std::string dump(const TensorEnumerator& t) {
  std::ostringstream os;
  for (const auto& [key, poly] : t.entries) {
    const auto [e, ep] = detail::split_pair_key(key, t.q());
    std::string se = pauli_string_to_text(e);
    std::string sep = pauli_string_to_text(ep);
    if (se.empty()) se = "-";
    if (sep.empty()) sep = "-";
    os << se << " | " << sep << " | " << poly.to_pretty() << "\n";
  }
  return os.str();
}

}  // namespace qwe

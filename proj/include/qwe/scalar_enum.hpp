#pragma once

// Weight enumerators of stabilizer codes by direct group counting.
//
// Count convention: a_d counts stabilizer group elements of weight d and
// b_d counts (unsigned) normalizer elements of weight d, so a_0 = b_0 = 1.
// The raw operator-trace values are q^{2k} * a and q^k * b.  The same
// convention applies termwise to the finer schemes (double, refined-double,
// complete): each group / normalizer element contributes one monomial.

#include <cstdint>
#include <map>
#include <optional>
#include <thread>
#include <vector>

#include "qwe/enum_poly.hpp"
#include "qwe/errors.hpp"
#include "qwe/macwilliams.hpp"
#include "qwe/stab_group.hpp"

namespace qwe {

enum class Convention { count, raw };

inline const char* convention_name(Convention c) {
  return c == Convention::count ? "count" : "raw";
}
inline Convention convention_from_name(const std::string& s) {
  if (s == "count") return Convention::count;
  if (s == "raw") return Convention::raw;
  throw ValidationError("unknown convention '" + s + "' (count|raw)");
}

struct EnumeratorPair {
  EnumPoly a;
  EnumPoly b;
  Convention convention = Convention::count;
  uint32_t q = 2;
  int n = 0;
  int k = 0;
};

inline Rat q_power(uint32_t q, int e) {
  BigInt v(1);
  for (int i = 0; i < (e < 0 ? -e : e); ++i) v *= q;
  return e < 0 ? Rat(1) / Rat(v) : Rat(v);
}

// Converts between the count and raw conventions: raw a = q^{2k} count a,
// raw b = q^k count b.
inline EnumeratorPair with_convention(EnumeratorPair p, Convention target) {
  if (p.convention == target) return p;
  const int sign = target == Convention::raw ? 1 : -1;
  p.a.scale(q_power(p.q, sign * 2 * p.k));
  p.b.scale(q_power(p.q, sign * p.k));
  p.convention = target;
  return p;
}

struct CountingOptions {
  uint64_t group_cap = StabilizerGroup::kDefaultGroupCap;
  int threads = 1;  // <= 0 selects std::thread::hardware_concurrency()
};

namespace detail {

inline int resolve_threads(int threads, uint64_t work) {
  if (threads <= 0) {
    unsigned hc = std::thread::hardware_concurrency();
    threads = hc == 0 ? 1 : static_cast<int>(hc);
  }
  // Small sweeps are not worth spawning threads for.
  if (work < 1u << 14) return 1;
  if (static_cast<uint64_t>(threads) > work) threads = static_cast<int>(work);
  return threads;
}

// Packed-key increment contributed by one site of type (a, b), for fast
// per-element monomial assembly.  Safe to accumulate by plain integer
// addition as long as every variable's total exponent stays <= packing.mask,
// which verify_site_totals checks up front (totals are bounded by n).
inline std::vector<uint64_t> site_key_table(const WeightScheme& scheme,
                                            const ExpPacking& packing) {
  const uint32_t q = scheme.q;
  std::vector<uint64_t> table(q * q, 0);
  std::vector<std::pair<uint32_t, uint32_t>> incs;
  for (uint32_t a = 0; a < q; ++a)
    for (uint32_t b = 0; b < q; ++b) {
      uint64_t key = 0;
      scheme.site_exponents(a, b, true, incs);
      for (const auto& [v, inc] : incs)
        key += static_cast<uint64_t>(inc)
               << (packing.bits * (packing.nvars - 1 - v));
      table[a * q + b] = key;
    }
  return table;
}

inline void check_site_totals(const ExpPacking& packing, size_t n) {
  // Each site contributes exponent increments of at most 1 per variable for
  // every shipped scheme, so totals are bounded by n.
  if (n > packing.mask)
    throw ResourceError("polynomial exponents for " + std::to_string(n) +
                        " sites exceed the packed-key range");
}

inline uint64_t monomial_key(const PauliString& u,
                             const std::vector<uint64_t>& table, uint32_t q) {
  uint64_t key = 0;
  for (size_t i = 0; i < u.n(); ++i) key += table[u.x[i] * q + u.z[i]];
  return key;
}

inline void add_exponents_inplace(PauliString& acc, const PauliString& o,
                                  uint32_t q) {
  for (size_t i = 0; i < acc.n(); ++i) {
    acc.x[i] = static_cast<uint8_t>((acc.x[i] + o.x[i]) % q);
    acc.z[i] = static_cast<uint8_t>((acc.z[i] + o.z[i]) % q);
  }
}

// Enumerates the F_q span of `basis` (exponent-vector addition mod q) over
// linear indices [from, to), least-significant digit first, via an odometer
// that maintains the running sum.
template <typename Visitor>
void enumerate_fq_span_range(uint32_t q, const std::vector<PauliString>& basis,
                             size_t n, uint64_t from, uint64_t to,
                             Visitor&& visit) {
  PauliString cur(q, n);
  std::vector<uint32_t> digits(basis.size(), 0);
  uint64_t idx = from;
  for (size_t i = 0; i < basis.size(); ++i) {
    digits[i] = static_cast<uint32_t>(idx % q);
    idx /= q;
    for (uint32_t rep = 0; rep < digits[i]; ++rep)
      add_exponents_inplace(cur, basis[i], q);
  }
  for (uint64_t at = from; at < to; ++at) {
    visit(static_cast<const PauliString&>(cur));
    if (at + 1 == to) break;
    for (size_t pos = 0;; ++pos) {
      add_exponents_inplace(cur, basis[pos], q);
      if (++digits[pos] < q) break;
      digits[pos] = 0;
    }
  }
}

// Counts monomials over a shard range via a callback that drives the
// enumeration, merging integer counts per packed key.
using CountMap = std::map<uint64_t, uint64_t>;

inline EnumPoly counts_to_poly(const WeightScheme& scheme,
                               const std::vector<CountMap>& shards) {
  EnumPoly out(scheme, true);
  for (const auto& shard : shards)
    for (const auto& [key, count] : shard)
      out.add_term_key(key, Cyc(scheme.q, Rat(count)));
  return out;
}

}  // namespace detail

// Type-A enumerator (count convention, homogeneous) of a validated group.
inline EnumPoly count_group_weights(const StabilizerGroup& g,
                                    const WeightScheme& scheme,
                                    const CountingOptions& opts = {}) {
  const uint64_t order = g.checked_order(opts.group_cap);
  EnumPoly proto(scheme, true);
  detail::check_site_totals(proto.packing(), g.n());
  const std::vector<uint64_t> table =
      detail::site_key_table(scheme, proto.packing());
  const int threads = detail::resolve_threads(opts.threads, order);
  std::vector<detail::CountMap> shards(threads);
  auto run = [&](int t) {
    const uint64_t lo = order * t / threads;
    const uint64_t hi = order * (t + 1) / threads;
    detail::CountMap& local = shards[t];
    g.enumerate_range(lo, hi, [&](const PhasedPauli& p) {
      ++local[detail::monomial_key(p.u, table, g.q())];
    });
  };
  if (threads == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(run, t);
    for (auto& th : pool) th.join();
  }
  return detail::counts_to_poly(scheme, shards);
}

// Type-B enumerator by sweeping the unsigned normalizer span (q^{n+k}
// elements); requires q^{n+k} <= opts.group_cap.
inline EnumPoly count_normalizer_weights(const StabilizerGroup& g,
                                         const WeightScheme& scheme,
                                         const CountingOptions& opts = {}) {
  const std::vector<PauliString> basis = normalizer_kernel_basis(g);
  uint64_t order = 1;
  for (size_t i = 0; i < basis.size(); ++i) {
    if (order > opts.group_cap / g.q())
      throw ResourceError("normalizer span exceeds cap " +
                          std::to_string(opts.group_cap));
    order *= g.q();
  }
  EnumPoly proto(scheme, true);
  detail::check_site_totals(proto.packing(), g.n());
  const std::vector<uint64_t> table =
      detail::site_key_table(scheme, proto.packing());
  const int threads = detail::resolve_threads(opts.threads, order);
  std::vector<detail::CountMap> shards(threads);
  auto run = [&](int t) {
    const uint64_t lo = order * t / threads;
    const uint64_t hi = order * (t + 1) / threads;
    detail::CountMap& local = shards[t];
    detail::enumerate_fq_span_range(
        g.q(), basis, g.n(), lo, hi, [&](const PauliString& u) {
          ++local[detail::monomial_key(u, table, g.q())];
        });
  };
  if (threads == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(run, t);
    for (auto& th : pool) th.join();
  }
  return detail::counts_to_poly(scheme, shards);
}

// Both enumerators in the count convention.  B comes from the normalizer
// sweep when q^{n+k} fits under the cap and otherwise through the
// MacWilliams transform (count_b = q^k * count_a o Phi), which is always
// available.
inline EnumeratorPair enumerators_by_counting(const StabilizerGroup& g,
                                              const WeightScheme& scheme,
                                              const CountingOptions& opts = {}) {
  if (scheme.q != g.q())
    throw ValidationError("weight scheme alphabet does not match the code");
  // Groups are validated on construction; no re-check needed here.
  EnumeratorPair pair;
  pair.q = g.q();
  pair.n = static_cast<int>(g.n());
  pair.k = static_cast<int>(g.k());
  pair.convention = Convention::count;
  pair.a = count_group_weights(g, scheme, opts);

  // q^{n+k} <= cap <=> the span sweep is feasible.
  bool span_feasible = true;
  uint64_t order = 1;
  for (int i = 0; i < pair.n + pair.k; ++i) {
    if (order > opts.group_cap / g.q()) {
      span_feasible = false;
      break;
    }
    order *= g.q();
  }
  if (span_feasible) {
    pair.b = count_normalizer_weights(g, scheme, opts);
  } else {
    pair.b = apply_mw(pair.a, pair.n);
    pair.b.scale(q_power(pair.q, pair.k));
  }
  return pair;
}

// Scalar weight-d coefficients of the pair (count convention).  Accepts the
// shor-laflamme scheme directly and the complete scheme via collapse; the
// double and refined schemes do not determine site weights.
namespace detail {

inline EnumPoly scalar_view(const EnumPoly& p) {
  switch (p.scheme().kind) {
    case SchemeKind::shor_laflamme: return p;
    case SchemeKind::complete: return collapse_complete_to_scalar(p);
    default:
      throw ValidationError(
          "distance needs the shor-laflamme or complete scheme; the double "
          "and refined schemes do not determine site weights");
  }
}

}  // namespace detail

// Distance from a count-convention pair: for k >= 1 the smallest d >= 1 with
// b_d > a_d; for k = 0 the smallest d >= 1 with a_d > 0.  Empty result means
// no such d <= n exists ("undetected").
inline std::optional<int> distance(const EnumeratorPair& pair) {
  if (pair.convention != Convention::count)
    throw ValidationError("distance expects the count convention");
  const EnumPoly a = detail::scalar_view(pair.a);
  const EnumPoly b = detail::scalar_view(pair.b);
  for (int d = 1; d <= pair.n; ++d) {
    const std::vector<uint64_t> exps = {static_cast<uint64_t>(pair.n - d),
                                        static_cast<uint64_t>(d)};
    const Rat ad = a.coeff_of(exps).as_rational();
    if (pair.k >= 1) {
      if (b.coeff_of(exps).as_rational() > ad) return d;
    } else if (ad > 0) {
      return d;
    }
  }
  return std::nullopt;
}

// True iff a and b agree termwise (count convention).
inline bool purity_check(const EnumeratorPair& pair) {
  if (pair.convention != Convention::count)
    throw ValidationError("purity_check expects the count convention");
  return pair.a == pair.b;
}

}  // namespace qwe

#pragma once

// Brute-force enumerator oracle over dense matrices: evaluates the defining
// trace sums
//   A-coefficient(E) = Tr(E^dagger M1) Tr(E M2)
//   B-coefficient(E) = Tr(E^dagger M1 E M2)
// over every canonical error-basis element E, bins them by the requested
// weight scheme, and snaps the floating-point results to exact rationals.
// Oracle-grade: used by tests to validate the symbolic counting paths, never
// by the contraction engine.

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "qwe/dense.hpp"
#include "qwe/enum_poly.hpp"
#include "qwe/errors.hpp"
#include "qwe/pauli.hpp"
#include "qwe/scalar_enum.hpp"
#include "qwe/stab_group.hpp"

namespace qwe {

struct DenseOracleResult {
  // Raw-convention pair (A_0 = Tr(M1)Tr(M2), not normalized to 1).  The
  // oracle has no notion of k; pair.k is left at 0 and callers comparing
  // against count-convention results convert those to raw instead.
  EnumeratorPair pair;
  double residual = 0;  // max |computed - snapped rational|
};

inline constexpr size_t kDenseOracleMaxDim = 128;
inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kOracleResidualTol = 1e-6;

// The code-space projector (1/q^{n-k}) sum_g g of a stabilizer group.
// max_dim is an explicit opt-in for oversized one-off checks; the default is
// the documented cap.
inline DMat projector_from_group(const StabilizerGroup& g,
                                 size_t max_dim = kDenseOracleMaxDim) {
  size_t dim = 1;
  for (size_t i = 0; i < g.n(); ++i) {
    dim *= g.q();
    if (dim > max_dim)
      throw ResourceError("projector dimension exceeds the dense-oracle cap");
  }
  DMat sum(dim);
  uint64_t order = 0;
  g.enumerate(1u << 20, [&](const PhasedPauli& p) {
    DMat m = pauli_matrix(p);
    sum = sum + m;
    ++order;
  });
  return scale(sum, Cx(1.0 / static_cast<double>(order)));
}

inline DenseOracleResult enumerators_dense_oracle(
    const DMat& m1, const DMat& m2, const WeightScheme& scheme,
    size_t max_dim = kDenseOracleMaxDim) {
  const uint32_t q = scheme.q;
  if (m1.dim != m2.dim || m1.dim == 0)
    throw ValidationError("dense oracle needs equal nonzero dimensions");
  if (m1.dim > max_dim)
    throw ResourceError("dense oracle capped at matrix side " +
                        std::to_string(max_dim));
  size_t n = 0, dim = 1;
  while (dim < m1.dim) {
    dim *= q;
    ++n;
  }
  if (dim != m1.dim)
    throw ValidationError("matrix side is not a power of the alphabet size");
  if (!is_hermitian(m1, kHermitianTol) || !is_hermitian(m2, kHermitianTol))
    throw ValidationError("dense oracle requires Hermitian inputs");

  // Sparse nonzero list of M2 for the B-term.
  struct Nz {
    size_t j, i;
    Cx v;
  };
  std::vector<Nz> nz2;
  for (size_t j = 0; j < dim; ++j)
    for (size_t i = 0; i < dim; ++i) {
      const Cx v = m2.at(j, i);
      if (std::abs(v) > 0) nz2.push_back({j, i, v});
    }

  EnumPoly proto(scheme, true);
  detail::check_site_totals(proto.packing(), n);
  const std::vector<uint64_t> table =
      detail::site_key_table(scheme, proto.packing());

  // Accumulate complex coefficients per packed monomial key.
  std::map<uint64_t, std::pair<Cx, Cx>> acc;  // key -> (A, B)
  PauliString u(q, n);
  const uint64_t total = [&] {
    uint64_t t = 1;
    for (size_t i = 0; i < 2 * n; ++i) t *= q;
    return t;
  }();
  for (uint64_t idx = 0; idx < total; ++idx) {
    uint64_t rem = idx;
    for (size_t s = 0; s < n; ++s) {
      u.x[s] = static_cast<uint8_t>(rem % q);
      rem /= q;
      u.z[s] = static_cast<uint8_t>(rem % q);
      rem /= q;
    }
    const PhasedPauli e = canonical_rep(u);
    const PauliAction act(e);
    Cx tr_a1 = 0, tr_a2 = 0, tr_b = 0;
    for (size_t i = 0; i < dim; ++i) {
      tr_a1 += std::conj(act.c[i]) * m1.at(act.sigma[i], i);
      tr_a2 += act.c[i] * m2.at(i, act.sigma[i]);
    }
    for (const Nz& e2 : nz2)
      tr_b += std::conj(act.c[e2.i]) * act.c[e2.j] *
              m1.at(act.sigma[e2.i], act.sigma[e2.j]) * e2.v;
    const uint64_t key = detail::monomial_key(u, table, q);
    auto& slot = acc[key];
    slot.first += tr_a1 * tr_a2;
    slot.second += tr_b;
  }

  // Snap to rationals with denominator q^{2n}.
  BigInt q2n(1);
  for (size_t i = 0; i < 2 * n; ++i) q2n *= q;
  const double scale_d = static_cast<double>(q2n.convert_to<double>());
  DenseOracleResult out;
  out.pair.q = q;
  out.pair.n = static_cast<int>(n);
  out.pair.k = 0;
  out.pair.convention = Convention::raw;
  out.pair.a = EnumPoly(scheme, true);
  out.pair.b = EnumPoly(scheme, true);
  auto snap = [&](Cx v, EnumPoly& dst, uint64_t key) {
    const double scaled = v.real() * scale_d;
    BigInt num(static_cast<long long>(std::llround(scaled)));
    const double resid =
        std::max(std::abs(v.real() - num.convert_to<double>() / scale_d),
                 std::abs(v.imag()));
    out.residual = std::max(out.residual, resid);
    Rat r(num, q2n);
    if (r != 0) dst.add_term_key(key, Cyc(q, r));
  };
  for (const auto& [key, ab] : acc) {
    snap(ab.first, out.pair.a, key);
    snap(ab.second, out.pair.b, key);
  }
  if (out.residual > kOracleResidualTol)
    throw ConsistencyError("dense oracle rounding residual " +
                           std::to_string(out.residual) +
                           " exceeds tolerance");
  return out;
}

}  // namespace qwe

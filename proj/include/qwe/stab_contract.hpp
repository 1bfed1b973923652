#pragma once
// Symbolic contraction of stabilizer groups.  Gluing two tensor legs projects
// onto the maximally entangled pair state of the two sites, which is itself a
// stabilizer state: postselecting its two generators and then discarding the
// glued sites turns a stabilizer group on n sites into one on n-2 sites, with
// every phase tracked exactly.  This file provides that machinery plus a
// phase-tracked canonical form, which gives decidable group equality.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qwe/errors.hpp"
#include "qwe/pauli.hpp"
#include "qwe/stab_group.hpp"

namespace qwe {

namespace detail {

// Row coordinate in the symplectic layout: columns 0..n-1 read x, n..2n-1
// read z.
inline uint32_t row_coord(const PhasedPauli& p, int64_t n, int64_t col) {
  return col < n ? p.u.x[static_cast<size_t>(col)]
                 : p.u.z[static_cast<size_t>(col - n)];
}

// Commutation exponent omega(g, m) evaluated over a precomputed support list
// of m, so measuring a low-weight operator against a large group stays cheap.
inline uint32_t omega_on_support(const PauliString& g, const PauliString& m,
                                 const std::vector<size_t>& support) {
  uint64_t s = 0;
  const uint64_t q = g.q;
  for (size_t i : support) s += g.z[i] * m.x[i] + g.x[i] * (q - m.z[i]);
  return static_cast<uint32_t>(s % q);
}

}  // namespace detail

// Reduces a list of (not necessarily independent) phased group elements to
// the unique reduced row echelon basis of the group they generate, carrying
// phases through every row operation.  Dependent inputs are legal and simply
// drop out; if a dependency multiplies to a nonzero phase times the identity
// the inputs did not generate a stabilizer group at all, which is reported as
// a ConsistencyError because every caller in this library constructs its
// inputs from groups that were valid to begin with.
inline std::vector<PhasedPauli> reduce_phased(uint32_t q, int64_t n,
                                              std::vector<PhasedPauli> rows) {
  const uint32_t full_turn = 4 * q;
  auto drop_identity = [&](const PhasedPauli& p) {
    if (!p.u.is_identity()) return false;
    if (p.phase % full_turn != 0)
      throw ConsistencyError(
          "dependent stabilizer generators multiply to a phased identity");
    return true;
  };
  rows.erase(std::remove_if(rows.begin(), rows.end(), drop_identity),
             rows.end());

  size_t r = 0;
  for (int64_t col = 0; col < 2 * n && r < rows.size(); ++col) {
    size_t pivot = r;
    while (pivot < rows.size() && detail::row_coord(rows[pivot], n, col) == 0)
      ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[r], rows[pivot]);
    const uint32_t pv = detail::row_coord(rows[r], n, col);
    if (pv != 1) rows[r] = pow(rows[r], fq_inv(pv, q));
    for (size_t j = 0; j < rows.size(); ++j) {
      if (j == r) continue;
      const uint32_t f = detail::row_coord(rows[j], n, col);
      if (f != 0) rows[j] = mul(rows[j], pow(rows[r], q - f));
    }
    ++r;
  }
  for (size_t j = r; j < rows.size(); ++j) {
    if (!rows[j].u.is_identity() || rows[j].phase % full_turn != 0)
      throw ConsistencyError(
          "dependent stabilizer generators multiply to a phased identity");
  }
  rows.resize(r);
  return rows;
}

// Unique canonical generating set (reduced echelon rows with exact phases).
inline std::vector<PhasedPauli> canonical_generators(const StabilizerGroup& g) {
  return reduce_phased(g.q(), g.n(), g.generators());
}

// Exact group equality, phases included.
inline bool same_group(const StabilizerGroup& a, const StabilizerGroup& b) {
  if (a.q() != b.q() || a.n() != b.n()) return false;
  return canonical_generators(a) == canonical_generators(b);
}

// The tensor product group of a and b on n_a + n_b sites (a's sites first).
inline StabilizerGroup tensor_groups(const StabilizerGroup& a,
                                     const StabilizerGroup& b) {
  if (a.q() != b.q())
    throw ValidationError("cannot tensor groups over different alphabets");
  const PauliString id_a(a.q(), static_cast<size_t>(a.n()));
  const PauliString id_b(b.q(), static_cast<size_t>(b.n()));
  std::vector<PhasedPauli> gens;
  gens.reserve(static_cast<size_t>(a.num_generators() + b.num_generators()));
  for (const PhasedPauli& g : a.generators())
    gens.push_back(PhasedPauli(tensor(g.u, id_b), g.phase));
  for (const PhasedPauli& g : b.generators())
    gens.push_back(PhasedPauli(tensor(id_a, g.u), g.phase));
  return StabilizerGroup(a.q(), a.n() + b.n(), std::move(gens));
}

// Postselects the +1 eigenspace of the measurement operator m on the group
// generated by gens, updating gens in place.  Standard stabilizer
// measurement, phase-exact and valid for any prime q:
//  - if some generator fails to commute with m, powers of one such pivot
//    generator repair all the others and m replaces the pivot;
//  - if m commutes with everything and the group already contains m with the
//    same phase, nothing changes;
//  - if it contains m only with a different phase, the projector kills the
//    state: `what` names the offending operation in the ValidationError;
//  - otherwise m joins the generating set.
// The caller guarantees gens generate a valid stabilizer group and that m has
// order q (true for every operator this library measures).
inline void measure_postselect(uint32_t q, int64_t n,
                               std::vector<PhasedPauli>& gens,
                               const PhasedPauli& m, const std::string& what) {
  std::vector<size_t> support;
  for (size_t i = 0; i < m.u.n(); ++i)
    if (m.u.x[i] != 0 || m.u.z[i] != 0) support.push_back(i);

  std::optional<size_t> pivot;
  std::vector<uint32_t> c(gens.size(), 0);
  for (size_t i = 0; i < gens.size(); ++i) {
    c[i] = detail::omega_on_support(gens[i].u, m.u, support);
    if (c[i] != 0 && !pivot) pivot = i;
  }

  if (pivot) {
    const uint32_t inv_cp = fq_inv(c[*pivot], q);
    for (size_t j = 0; j < gens.size(); ++j) {
      if (j == *pivot || c[j] == 0) continue;
      const uint32_t t = ((q - c[j]) * inv_cp) % q;
      gens[j] = mul(gens[j], pow(gens[*pivot], t));
    }
    gens[*pivot] = m;
    return;
  }

  // m commutes with the whole group: decide membership over F_q, then check
  // the phase by exact reconstruction.
  std::vector<FqVec> mat;
  mat.reserve(gens.size());
  for (const PhasedPauli& g : gens) mat.push_back(to_symplectic(g.u));
  FqRref rr(std::move(mat), q);
  const std::optional<FqVec> sol = rr.solve(to_symplectic(m.u));
  if (!sol) {
    gens.push_back(m);
    return;
  }
  PhasedPauli acc = identity_op(q, static_cast<size_t>(n));
  for (size_t i = 0; i < gens.size(); ++i)
    if ((*sol)[i] != 0) acc = mul(acc, pow(gens[i], (*sol)[i]));
  if (acc == m) return;
  throw ValidationError("contraction annihilated the state: postselecting " +
                        what + " on a forbidden eigenvalue");
}

struct MergeResult {
  StabilizerGroup group;           // group on the surviving sites
  std::vector<int64_t> kept_sites; // original index of each surviving site
};

// Glues pairs of sites of one group: for every edge (a, b) the sites a and b
// are projected onto the pair state stabilized by X_a X_b and Z_a Z_b^{q-1},
// then removed.  Gluing sites of two different codes is the composition
// tensor_groups + glue_sites.  Edge labels feed error messages (a label like
// "t1.p3~t2.p6" makes annihilation reports actionable); they default to site
// numbers.  All pair projectors commute, so the edge order is irrelevant.
inline MergeResult glue_sites(uint32_t q, int64_t n,
                              std::vector<PhasedPauli> gens,
                              const std::vector<std::pair<int64_t, int64_t>>& edges,
                              const std::vector<std::string>& labels = {}) {
  if (!labels.empty() && labels.size() != edges.size())
    throw ValidationError("glue_sites: one label per edge expected");
  std::vector<bool> glued(static_cast<size_t>(n), false);
  for (const auto& [a, b] : edges) {
    if (a < 0 || a >= n || b < 0 || b >= n)
      throw ValidationError("glue_sites: edge site out of range");
    if (a == b || glued[static_cast<size_t>(a)] || glued[static_cast<size_t>(b)])
      throw ValidationError("glue_sites: a site can be glued at most once");
    glued[static_cast<size_t>(a)] = glued[static_cast<size_t>(b)] = true;
  }

  auto pair_ops = [&](int64_t a, int64_t b) {
    PauliString u1(q, static_cast<size_t>(n));
    u1.x[static_cast<size_t>(a)] = 1;
    u1.x[static_cast<size_t>(b)] = 1;
    PauliString u2(q, static_cast<size_t>(n));
    u2.z[static_cast<size_t>(a)] = 1;
    u2.z[static_cast<size_t>(b)] = static_cast<uint8_t>(q - 1);
    return std::pair<PhasedPauli, PhasedPauli>(PhasedPauli(u1), PhasedPauli(u2));
  };

  for (size_t e = 0; e < edges.size(); ++e) {
    const auto [m1, m2] = pair_ops(edges[e].first, edges[e].second);
    const std::string what =
        labels.empty() ? "sites " + std::to_string(edges[e].first) + "~" +
                             std::to_string(edges[e].second)
                       : labels[e];
    measure_postselect(q, n, gens, m1, what);
    measure_postselect(q, n, gens, m2, what);
  }

  // Every generator now commutes with every pair projector, which pins its
  // action on each edge to x_b = x_a, z_b = -z_a.  Multiplying by the in-group
  // operators M1^{q-x_a} M2^{q-z_a} clears both sites without changing the
  // group, after which the glued sites can be dropped.
  for (const auto& [a, b] : edges) {
    const auto [m1, m2] = pair_ops(a, b);
    for (PhasedPauli& g : gens) {
      const uint32_t xa = g.u.x[static_cast<size_t>(a)];
      const uint32_t za = g.u.z[static_cast<size_t>(a)];
      if (xa != 0) g = mul(g, pow(m1, q - xa));
      if (za != 0) g = mul(g, pow(m2, q - za));
      if (g.u.x[static_cast<size_t>(a)] != 0 ||
          g.u.z[static_cast<size_t>(a)] != 0 ||
          g.u.x[static_cast<size_t>(b)] != 0 ||
          g.u.z[static_cast<size_t>(b)] != 0)
        throw ConsistencyError(
            "glue_sites: generator still acts on a glued site after cleanup");
    }
  }

  std::vector<int64_t> kept;
  for (int64_t i = 0; i < n; ++i)
    if (!glued[static_cast<size_t>(i)]) kept.push_back(i);
  std::vector<PhasedPauli> projected;
  projected.reserve(gens.size());
  for (const PhasedPauli& g : gens) {
    PauliString u(q, kept.size());
    for (size_t i = 0; i < kept.size(); ++i) {
      u.x[i] = g.u.x[static_cast<size_t>(kept[i])];
      u.z[i] = g.u.z[static_cast<size_t>(kept[i])];
    }
    projected.push_back(PhasedPauli(std::move(u), g.phase));
  }
  std::vector<PhasedPauli> reduced =
      reduce_phased(q, static_cast<int64_t>(kept.size()), std::move(projected));
  return MergeResult{StabilizerGroup(q, kept.size(), std::move(reduced)),
                     std::move(kept)};
}

inline MergeResult glue_sites(const StabilizerGroup& g,
                              const std::vector<std::pair<int64_t, int64_t>>& edges,
                              const std::vector<std::string>& labels = {}) {
  return glue_sites(g.q(), g.n(), g.generators(), edges, labels);
}

}  // namespace qwe

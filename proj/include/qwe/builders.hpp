#pragma once
// Bundled stabilizer codes, states, and tensor-network documents.  Everything
// here is constructed from explicit generator data; nothing is read from
// disk.  The network builders return the same JSON documents that ship under
// data/, so tests can exercise the full parse/plan/contract pipeline without
// touching the filesystem.

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qwe/errors.hpp"
#include "qwe/pauli.hpp"
#include "qwe/stab_group.hpp"

namespace qwe::builders {

// ---- small construction helpers ---------------------------------------------

inline StabilizerGroup make_group(uint32_t q,
                                  const std::vector<std::string>& gens,
                                  size_t n_if_empty = 0) {
  std::vector<PhasedPauli> ops;
  size_t n = n_if_empty;
  for (const std::string& g : gens) {
    PhasedPauli op = parse_phased_pauli("+1", g, q);
    n = op.n();
    ops.push_back(std::move(op));
  }
  return StabilizerGroup(q, n, std::move(ops));
}

inline StabCode make_code(
    uint32_t q, const std::vector<std::string>& gens,
    const std::vector<std::pair<std::string, std::string>>& logical,
    size_t n_if_empty = 0) {
  StabCode code{make_group(q, gens, n_if_empty), std::nullopt};
  if (!logical.empty()) {
    LogicalFrame f;
    for (const auto& [x, z] : logical)
      f.pairs.push_back({parse_phased_pauli("+1", x, q),
                         parse_phased_pauli("+1", z, q)});
    validate_frame(code.group, f);
    code.logical = std::move(f);
  }
  return code;
}

// X^e at the listed sites (phase 0).
inline PhasedPauli x_word(uint32_t q, size_t n, const std::vector<size_t>& sites,
                          uint32_t e = 1) {
  PauliString u(q, n);
  for (size_t s : sites) u.x[s] = static_cast<uint8_t>((u.x[s] + e) % q);
  return PhasedPauli(std::move(u));
}

// Z^e at the listed sites (phase 0).
inline PhasedPauli z_word(uint32_t q, size_t n, const std::vector<size_t>& sites,
                          uint32_t e = 1) {
  PauliString u(q, n);
  for (size_t s : sites) u.z[s] = static_cast<uint8_t>((u.z[s] + e) % q);
  return PhasedPauli(std::move(u));
}

// ---- states and codes --------------------------------------------------------

// Maximally entangled pair state: stabilized by X⊗X and Z⊗Z^{q-1}.
inline StabilizerGroup bell_group(uint32_t q = 2) {
  PauliString xx(q, 2);
  xx.x = {1, 1};
  PauliString zz(q, 2);
  zz.z = {1, static_cast<uint8_t>(q - 1)};
  return StabilizerGroup(q, 2,
                         {PhasedPauli(std::move(xx)), PhasedPauli(std::move(zz))});
}

inline StabilizerGroup zero_group() { return make_group(2, {"Z"}); }
inline StabilizerGroup plus_group() { return make_group(2, {"X"}); }

inline StabilizerGroup ghz_group(size_t n) {
  std::vector<PhasedPauli> gens;
  std::vector<size_t> all(n);
  for (size_t i = 0; i < n; ++i) all[i] = i;
  gens.push_back(x_word(2, n, all));
  for (size_t i = 0; i + 1 < n; ++i) gens.push_back(z_word(2, n, {i, i + 1}));
  return StabilizerGroup(2, n, std::move(gens));
}

inline StabCode five_one_three_code() {
  return make_code(2, {"XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"},
                   {{"XXXXX", "ZZZZZ"}});
}

inline StabCode four_two_two_code() {
  return make_code(2, {"XXXX", "ZZZZ"},
                   {{"XIXI", "ZZII"}, {"XXII", "ZIZI"}});
}

inline StabCode four_one_two_code() {
  return make_code(2, {"IXZY", "XIYZ", "ZZZZ"}, {});
}

inline StabCode trivial_code(uint32_t q, size_t n) {
  StabCode code{StabilizerGroup(q, n, {}), std::nullopt};
  LogicalFrame f;
  for (size_t i = 0; i < n; ++i)
    f.pairs.push_back({x_word(q, n, {i}), z_word(q, n, {i})});
  code.logical = std::move(f);
  return code;
}

// Planar surface code on a rows×cols grid of primal qubits interleaved with a
// (rows-1)×(cols-1) grid of dual qubits: [[rows·cols+(rows-1)(cols-1), 1,
// min(rows, cols)]].  Primal qubits come first in row-major order, then dual
// qubits in row-major order.  One X stabilizer per horizontal primal edge,
// one Z stabilizer per vertical primal edge; X-bar is the first primal
// column, Z-bar the first primal row.
inline StabCode planar_code(size_t rows, size_t cols) {
  if (rows < 1 || cols < 1)
    throw ValidationError("planar code needs at least one row and column");
  const size_t n = rows * cols + (rows - 1) * (cols - 1);
  auto primal = [&](size_t i, size_t j) { return i * cols + j; };
  auto dual = [&](size_t i, size_t j) {
    return rows * cols + i * (cols - 1) + j;
  };
  std::vector<PhasedPauli> gens;
  for (size_t i = 0; i < rows; ++i)
    for (size_t j = 0; j + 1 < cols; ++j) {
      std::vector<size_t> sites{primal(i, j), primal(i, j + 1)};
      if (i >= 1) sites.push_back(dual(i - 1, j));
      if (i + 1 < rows) sites.push_back(dual(i, j));
      gens.push_back(x_word(2, n, sites));
    }
  for (size_t i = 0; i + 1 < rows; ++i)
    for (size_t j = 0; j < cols; ++j) {
      std::vector<size_t> sites{primal(i, j), primal(i + 1, j)};
      if (j >= 1) sites.push_back(dual(i, j - 1));
      if (j + 1 < cols) sites.push_back(dual(i, j));
      gens.push_back(z_word(2, n, sites));
    }
  StabCode code{StabilizerGroup(2, n, std::move(gens)), std::nullopt};
  std::vector<size_t> col0(rows), row0(cols);
  for (size_t i = 0; i < rows; ++i) col0[i] = primal(i, 0);
  for (size_t j = 0; j < cols; ++j) row0[j] = primal(0, j);
  LogicalFrame f;
  f.pairs.push_back({x_word(2, n, col0), z_word(2, n, row0)});
  validate_frame(code.group, f);
  code.logical = std::move(f);
  return code;
}

// The distance-2 planar code [[5,1,2]] (2×2 grid plus one dual qubit).
inline StabCode five_one_two_code() { return planar_code(2, 2); }

inline StabilizerGroup six_zero_four_group() {
  StabCode c = five_one_three_code();
  return encoding_state(c.group, c.frame());
}

inline StabilizerGroup six_zero_three_group() {
  StabCode c = four_two_two_code();
  return encoding_state(c.group, c.frame());
}

// Uniformly-ish random stabilizer group: m independent pairwise-commuting
// generators with uniform phases among the q allowed ones.  Not a
// Haar-uniform sample of codes; plenty random for cross-checking oracles.
inline StabilizerGroup random_stabilizer_group(uint32_t q, size_t n, size_t m,
                                               std::mt19937_64& rng) {
  if (m > n) throw ValidationError("cannot have more generators than sites");
  std::uniform_int_distribution<uint32_t> digit(0, q - 1);
  std::vector<PhasedPauli> gens;
  std::vector<FqVec> rows;
  for (size_t tries = 0; gens.size() < m; ++tries) {
    if (tries > 10000)
      throw ResourceError("random group generation failed to converge");
    PauliString u(q, n);
    bool trivial = true;
    for (size_t s = 0; s < n; ++s) {
      u.x[s] = static_cast<uint8_t>(digit(rng));
      u.z[s] = static_cast<uint8_t>(digit(rng));
      if (u.x[s] || u.z[s]) trivial = false;
    }
    if (trivial) continue;
    bool commutes = true;
    for (const PhasedPauli& g : gens)
      if (omega_exp(g.u, u) != 0) {
        commutes = false;
        break;
      }
    if (!commutes) continue;
    std::vector<FqVec> trial = rows;
    trial.push_back(to_symplectic(u));
    if (FqRref(trial, q).rank() != trial.size()) continue;
    rows = std::move(trial);
    PhasedPauli op = canonical_rep(u);
    op.phase = (op.phase + 4 * digit(rng)) % (4 * q);
    gens.push_back(std::move(op));
  }
  return StabilizerGroup(q, n, std::move(gens));
}

// ---- network documents ---------------------------------------------------------

inline nlohmann::json lego_json(const std::string& id, const StabilizerGroup& g,
                                const std::optional<LogicalFrame>& frame,
                                const std::vector<std::string>& legs) {
  return nlohmann::json{
      {"id", id}, {"code", code_to_json(g, frame)}, {"legs", legs}};
}

// length Bell pairs glued end to end; the surviving code is again a Bell pair.
inline nlohmann::json bell_chain_network(size_t length, uint32_t q = 2) {
  if (length < 1) throw ValidationError("bell chain needs at least one lego");
  nlohmann::json legos = nlohmann::json::array();
  nlohmann::json contract = nlohmann::json::array();
  const StabilizerGroup bell = bell_group(q);
  auto id = [](size_t i) { return "t" + std::to_string(i + 1); };
  for (size_t i = 0; i < length; ++i)
    legos.push_back(lego_json(id(i), bell, std::nullopt, {"p1", "p2"}));
  for (size_t i = 0; i + 1 < length; ++i)
    contract.push_back({id(i) + ".p2", id(i + 1) + ".p1"});
  return nlohmann::json{
      {"q", q},
      {"scheme", "shor-laflamme"},
      {"legos", std::move(legos)},
      {"contract", std::move(contract)},
      {"dangling",
       {{"physical", {id(0) + ".p1", id(length - 1) + ".p2"}}, {"logical", nlohmann::json::array()}}}};
}

// [[25,1,4]] surface code as a two-level network of [[5,1,2]] legos: one
// outer encoding lego whose five physical legs are glued to the logical legs
// of five inner encoding legos.  The perturbed variant swaps one inner
// lego's logical leg with a physical one (a miswired network) while keeping
// the advertised distance, so consuming it must fail the distance check.
inline nlohmann::json surface_network(bool perturbed = false) {
  const StabCode block = five_one_two_code();
  const std::vector<std::string> enc_legs{"p1", "p2", "p3", "p4", "p5", "l1"};
  // The perturbed variant swaps one inner block for a distance-1 code, so
  // the document's declared distance is honestly wrong.
  StabCode weak{make_group(2, {"ZIIII", "IZIII", "IIZII", "IIIZI"}),
                std::nullopt};
  nlohmann::json legos = nlohmann::json::array();
  legos.push_back(lego_json("c0", block.group, block.logical, enc_legs));
  nlohmann::json contract = nlohmann::json::array();
  nlohmann::json physical = nlohmann::json::array();
  for (size_t i = 1; i <= 5; ++i) {
    const std::string id = "b" + std::to_string(i);
    const bool twist = perturbed && i == 3;
    legos.push_back(lego_json(id, twist ? weak.group : block.group,
                              twist ? weak.frame() : block.logical, enc_legs));
    contract.push_back({"c0.p" + std::to_string(i), id + ".l1"});
    for (size_t p = 1; p <= 5; ++p)
      physical.push_back(id + ".p" + std::to_string(p));
  }
  return nlohmann::json{{"q", 2},
                        {"scheme", "shor-laflamme"},
                        {"legos", std::move(legos)},
                        {"contract", std::move(contract)},
                        {"dangling",
                         {{"physical", std::move(physical)},
                          {"logical", {"c0.l1"}}}},
                        {"expected_distance", 4}};
}

namespace detail {

// One column of a rows×cols planar code as a stabilizer state whose
// interface legs carry the stabilizer flows across the two seams.  Matching
// li/ri legs of adjacent columns glue into the planar code's stabilizers;
// the leftmost column carries the logical leg.
inline nlohmann::json strip_column_json(size_t rows, size_t cols, size_t j) {
  const size_t L = rows;
  const bool first = (j == 0), last = (j + 1 == cols);
  const bool has_dual = !last;
  std::vector<std::string> legs;
  for (size_t i = 0; i < L; ++i) legs.push_back("p" + std::to_string(i));
  if (has_dual)
    for (size_t i = 0; i + 1 < L; ++i) legs.push_back("d" + std::to_string(i));
  if (!first)
    for (size_t i = 0; i < L; ++i) legs.push_back("li" + std::to_string(i));
  if (!last)
    for (size_t i = 0; i < L; ++i) legs.push_back("ri" + std::to_string(i));
  if (first) legs.push_back("logical");
  const size_t n = legs.size();

  // site indices per leg role
  auto p = [&](size_t i) { return i; };
  auto d = [&](size_t i) { return L + i; };
  const size_t li0 = L + (has_dual ? L - 1 : 0);
  auto li = [&](size_t i) { return li0 + i; };
  const size_t ri0 = li0 + (first ? 0 : L);
  auto ri = [&](size_t i) { return ri0 + i; };
  const size_t logical = n - 1;

  std::vector<PhasedPauli> gens;
  if (last) {
    for (size_t i = 0; i < L; ++i) gens.push_back(x_word(2, n, {p(i), li(i)}));
    for (size_t i = 0; i + 1 < L; ++i)
      gens.push_back(z_word(2, n, {p(i), p(i + 1), li(i), li(i + 1)}));
    gens.push_back(z_word(2, n, {p(0), li(0)}));
  } else {
    for (size_t i = 0; i < L; ++i) {
      std::vector<size_t> sites{p(i)};
      if (i >= 1) sites.push_back(d(i - 1));
      if (i + 1 < L) sites.push_back(d(i));
      sites.push_back(ri(i));
      gens.push_back(x_word(2, n, sites));  // right-moving X flow
    }
    for (size_t i = 0; i + 1 < L; ++i)
      gens.push_back(z_word(2, n, {d(i), ri(i), ri(i + 1)}));  // right Z flow
    if (first) {
      for (size_t i = 0; i + 1 < L; ++i)
        gens.push_back(z_word(2, n, {p(i), p(i + 1), d(i)}));
      std::vector<size_t> col(L);
      for (size_t i = 0; i < L; ++i) col[i] = p(i);
      col.push_back(logical);
      gens.push_back(x_word(2, n, col));               // X-bar, dressed
      gens.push_back(z_word(2, n, {p(0), ri(0), logical}));  // Z-bar flow
    } else {
      for (size_t i = 0; i < L; ++i)
        gens.push_back(x_word(2, n, {p(i), li(i)}));  // left X flow
      for (size_t i = 0; i + 1 < L; ++i)
        gens.push_back(
            z_word(2, n, {p(i), p(i + 1), d(i), li(i), li(i + 1)}));
      gens.push_back(z_word(2, n, {p(0), li(0), ri(0)}));  // Z-bar through
    }
  }
  StabilizerGroup g(2, n, std::move(gens));

  std::string id = "c";
  const std::string num = std::to_string(j);
  for (size_t pad = num.size(); pad < 3; ++pad) id += '0';
  id += num;
  return lego_json(id, g, std::nullopt, legs);
}

}  // namespace detail

// A rows-by-cols planar surface code as a chain of column legos; one logical
// dangling leg on the first column.  Greedy contraction sweeps the chain with
// constant open-leg width.
inline nlohmann::json strip_network(size_t rows, size_t cols,
                                    const std::string& scheme = "double") {
  if (rows < 2 || cols < 2)
    throw ValidationError("strip networks need at least a 2x2 grid");
  nlohmann::json legos = nlohmann::json::array();
  nlohmann::json contract = nlohmann::json::array();
  nlohmann::json physical = nlohmann::json::array();
  std::vector<std::string> ids;
  for (size_t j = 0; j < cols; ++j) {
    nlohmann::json lego = detail::strip_column_json(rows, cols, j);
    const std::string id = lego.at("id").get<std::string>();
    for (const auto& leg : lego.at("legs")) {
      const std::string name = leg.get<std::string>();
      if (name[0] == 'p' || name[0] == 'd') physical.push_back(id + "." + name);
    }
    ids.push_back(id);
    legos.push_back(std::move(lego));
  }
  for (size_t j = 0; j + 1 < cols; ++j)
    for (size_t i = 0; i < rows; ++i)
      contract.push_back({ids[j] + ".ri" + std::to_string(i),
                          ids[j + 1] + ".li" + std::to_string(i)});
  nlohmann::json doc{
      {"q", 2},
      {"scheme", scheme},
      {"legos", std::move(legos)},
      {"contract", std::move(contract)},
      {"dangling",
       {{"physical", std::move(physical)}, {"logical", {ids[0] + ".logical"}}}}};
  // Only schemes that resolve site weights can back a distance claim.
  if (scheme == "shor-laflamme" || scheme == "complete")
    doc["expected_distance"] = static_cast<int>(std::min(rows, cols));
  return doc;
}

// A wedge of holographic code: four perfect-tensor [[6,0,4]] legos arranged
// around a central [[4,1,2]] lego, rimmed by four more [[4,1,2]] legos.  The
// interesting property is that a good contraction order never needs more
// than four open legs.
inline nlohmann::json holographic_network() {
  const StabilizerGroup bs = four_one_two_code().group;  // 4 legs
  const StabilizerGroup pt = six_zero_four_group();      // 6 legs
  std::vector<std::string> bs_legs{"p1", "p2", "p3", "p4"};
  std::vector<std::string> pt_legs{"p1", "p2", "p3", "p4", "p5", "p6"};
  nlohmann::json legos = nlohmann::json::array();
  for (const char* id : {"bl", "br", "l", "m", "r"})
    legos.push_back(lego_json(id, bs, std::nullopt, bs_legs));
  for (const char* id : {"pb", "pl", "pr", "pt"})
    legos.push_back(lego_json(id, pt, std::nullopt, pt_legs));
  nlohmann::json contract = nlohmann::json::array();
  contract.push_back({"l.p1", "pt.p1"});
  contract.push_back({"l.p2", "pl.p1"});
  contract.push_back({"r.p1", "pt.p2"});
  contract.push_back({"r.p2", "pr.p1"});
  contract.push_back({"bl.p1", "pl.p2"});
  contract.push_back({"bl.p2", "pb.p1"});
  contract.push_back({"br.p1", "pr.p2"});
  contract.push_back({"br.p2", "pb.p2"});
  contract.push_back({"m.p1", "pt.p3"});
  contract.push_back({"m.p2", "pl.p3"});
  contract.push_back({"m.p3", "pr.p3"});
  contract.push_back({"m.p4", "pb.p3"});
  nlohmann::json physical = nlohmann::json::array();
  for (const char* id : {"bl", "br", "l", "r"})
    for (const char* leg : {"p3", "p4"})
      physical.push_back(std::string(id) + "." + leg);
  for (const char* id : {"pb", "pl", "pr", "pt"})
    for (const char* leg : {"p4", "p5", "p6"})
      physical.push_back(std::string(id) + "." + leg);
  return nlohmann::json{
      {"q", 2},
      {"scheme", "shor-laflamme"},
      {"legos", std::move(legos)},
      {"contract", std::move(contract)},
      {"dangling",
       {{"physical", std::move(physical)}, {"logical", nlohmann::json::array()}}}};
}

// Two random legos glued along one or two random leg pairs, returned together
// with the raw ingredients so tests can rebuild the merged group on a dense
// oracle.  Edge site pairs are global indices into g1 ⊗ g2.
struct RandomNetwork {
  nlohmann::json doc;
  StabilizerGroup g1, g2;
  std::vector<std::pair<int64_t, int64_t>> edges;
};

inline RandomNetwork random_two_lego_network(uint32_t q, std::mt19937_64& rng,
                                             size_t max_n = 4) {
  std::uniform_int_distribution<size_t> nd(2, max_n);
  const size_t n1 = nd(rng), n2 = nd(rng);
  std::uniform_int_distribution<size_t> md1(1, n1), md2(1, n2);
  StabilizerGroup g1 = random_stabilizer_group(q, n1, md1(rng), rng);
  StabilizerGroup g2 = random_stabilizer_group(q, n2, md2(rng), rng);
  std::uniform_int_distribution<size_t> ed(1, 2);
  const size_t edge_count = std::min(ed(rng), std::min(n1, n2));

  auto pick_sites = [&](size_t n, size_t count) {
    std::vector<size_t> all(n);
    for (size_t i = 0; i < n; ++i) all[i] = i;
    for (size_t i = 0; i < count; ++i) {
      std::uniform_int_distribution<size_t> pd(i, n - 1);
      std::swap(all[i], all[pd(rng)]);
    }
    all.resize(count);
    return all;
  };
  const std::vector<size_t> s1 = pick_sites(n1, edge_count);
  const std::vector<size_t> s2 = pick_sites(n2, edge_count);

  auto legs_of = [](char prefix, size_t n) {
    std::vector<std::string> legs;
    for (size_t i = 0; i < n; ++i)
      legs.push_back(std::string(1, prefix) + std::to_string(i));
    return legs;
  };
  const std::vector<std::string> l1 = legs_of('a', n1), l2 = legs_of('b', n2);

  nlohmann::json contract = nlohmann::json::array();
  std::vector<bool> glued1(n1, false), glued2(n2, false);
  RandomNetwork out{nlohmann::json{}, std::move(g1), std::move(g2), {}};
  for (size_t e = 0; e < edge_count; ++e) {
    contract.push_back({"t1." + l1[s1[e]], "t2." + l2[s2[e]]});
    glued1[s1[e]] = glued2[s2[e]] = true;
    out.edges.push_back({static_cast<int64_t>(s1[e]),
                         static_cast<int64_t>(n1 + s2[e])});
  }
  nlohmann::json physical = nlohmann::json::array();
  for (size_t i = 0; i < n1; ++i)
    if (!glued1[i]) physical.push_back("t1." + l1[i]);
  for (size_t i = 0; i < n2; ++i)
    if (!glued2[i]) physical.push_back("t2." + l2[i]);
  nlohmann::json legos = nlohmann::json::array();
  legos.push_back(lego_json("t1", out.g1, std::nullopt, l1));
  legos.push_back(lego_json("t2", out.g2, std::nullopt, l2));
  out.doc = nlohmann::json{
      {"q", q},
      {"scheme", "shor-laflamme"},
      {"legos", std::move(legos)},
      {"contract", std::move(contract)},
      {"dangling",
       {{"physical", std::move(physical)}, {"logical", nlohmann::json::array()}}}};
  return out;
}

}  // namespace qwe::builders

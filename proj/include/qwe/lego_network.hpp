#pragma once
// Contraction of stabilizer-lego networks into tensor weight enumerators.
//
// A network document wires lego blocks (stabilizer groups with named legs)
// into a larger code: contracted leg pairs are glued, dangling physical legs
// carry weight variables, and dangling logical legs stay open as tensor
// indices.  Contraction follows an explicit plan — a sequence of lego
// introductions and edge traces — that can be supplied with the document,
// replayed from a file, or found greedily.  Tracing an edge between two
// pending components fuses them in one matched pass over every pending edge
// joining the pair, so the open-leg width seen during execution equals the
// width the planner simulated.
//
// The engine keeps one sparse table per component: entry (E, E') maps to a
// sorted monomial vector.  For q = 2 every coefficient that can appear is a
// plain integer, so the table runs on arbitrary-precision integers; odd
// prime q runs on cyclotomic numbers.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qwe/enum_poly.hpp"
#include "qwe/errors.hpp"
#include "qwe/macwilliams.hpp"
#include "qwe/pauli.hpp"
#include "qwe/scalar_enum.hpp"
#include "qwe/stab_contract.hpp"
#include "qwe/stab_group.hpp"
#include "qwe/tensor_enum.hpp"

namespace qwe {

// ---- network documents ------------------------------------------------------

enum class LegRole : uint8_t { contracted, physical, logical };

struct NetLego {
  std::string id;
  StabilizerGroup state;          // the lego's group, one site per leg
  std::vector<std::string> legs;  // leg names in site order
};

struct NetEdge {
  size_t lego_a = 0, site_a = 0;
  size_t lego_b = 0, site_b = 0;
  std::string text;  // "a.x~b.y" as written in the document
};

struct LegRef {
  size_t lego = 0, site = 0;
};

struct Network {
  uint32_t q = 2;
  WeightScheme scheme;
  std::vector<NetLego> legos;
  std::vector<NetEdge> edges;
  std::vector<LegRef> physical;  // document order
  std::vector<LegRef> logical;   // document order; the tensor's open legs
  std::vector<std::vector<LegRole>> roles;     // [lego][site]
  std::vector<std::vector<size_t>> incident;   // lego -> indices of its edges
  std::vector<int> logical_legs_of;            // per lego
  std::optional<int> expected_distance;
  std::vector<std::string> doc_plan;  // raw plan steps, if the document has one

  std::map<std::string, size_t> id_of;
  std::string leg_name(size_t li, size_t si) const {
    return legos[li].id + "." + legos[li].legs[si];
  }
};

namespace detail {

inline void check_token(const std::string& s, const char* what) {
  if (s.empty())
    throw ValidationError(std::string(what) + " must not be empty");
  if (s.find('.') != std::string::npos || s.find('~') != std::string::npos)
    throw ValidationError(std::string(what) + " '" + s +
                          "' must not contain '.' or '~'");
}

inline std::pair<size_t, size_t> resolve_leg_ref(const std::string& ref,
                                                 const Network& net) {
  const auto dot = ref.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 >= ref.size())
    throw ValidationError("leg reference '" + ref +
                          "' is not of the form lego.leg");
  const auto it = net.id_of.find(ref.substr(0, dot));
  if (it == net.id_of.end())
    throw ValidationError("leg reference '" + ref + "' names an unknown lego");
  const NetLego& lego = net.legos[it->second];
  const std::string leg = ref.substr(dot + 1);
  const auto lit = std::find(lego.legs.begin(), lego.legs.end(), leg);
  if (lit == lego.legs.end())
    throw ValidationError("leg reference '" + ref + "' names an unknown leg");
  return {it->second, static_cast<size_t>(lit - lego.legs.begin())};
}

}  // namespace detail

inline Network parse_network(const nlohmann::json& doc) {
  if (!doc.is_object())
    throw ValidationError("network document must be a JSON object");
  for (const char* field : {"q", "scheme", "legos", "dangling"})
    if (!doc.contains(field))
      throw ValidationError(std::string("network document missing '") + field +
                            "'");
  Network net;
  net.q = doc.at("q").get<uint32_t>();
  net.scheme =
      WeightScheme{scheme_kind_from_name(doc.at("scheme").get<std::string>()),
                   net.q};

  const nlohmann::json& legos = doc.at("legos");
  if (!legos.is_array() || legos.empty())
    throw ValidationError("network needs a non-empty 'legos' array");
  if (legos.size() >= (1u << 24))
    throw ValidationError("too many legos in one network");
  for (const nlohmann::json& lj : legos) {
    if (!lj.is_object() || !lj.contains("id") || !lj.contains("code") ||
        !lj.contains("legs"))
      throw ValidationError("each lego needs 'id', 'code' and 'legs' fields");
    std::string id = lj.at("id").get<std::string>();
    detail::check_token(id, "lego id");
    if (net.id_of.count(id))
      throw ValidationError("duplicate lego id '" + id + "'");
    StabCode code = code_from_json(lj.at("code"));
    if (code.group.q() != net.q)
      throw ValidationError("lego '" + id +
                            "' has a different qudit dimension than the "
                            "network");
    std::vector<std::string> legs;
    for (const nlohmann::json& leg : lj.at("legs")) {
      const std::string name = leg.get<std::string>();
      detail::check_token(name, "leg name");
      if (std::find(legs.begin(), legs.end(), name) != legs.end())
        throw ValidationError("lego '" + id + "' repeats leg '" + name + "'");
      legs.push_back(name);
    }
    if (legs.size() > 256)
      throw ValidationError("a lego may declare at most 256 legs");
    const size_t n = code.group.n();
    const int64_t k = code.group.k();
    std::optional<StabilizerGroup> state;
    if (legs.size() == n) {
      state = std::move(code.group);
    } else if (k > 0 && legs.size() == n + static_cast<size_t>(k)) {
      // Encoding form: the code's encoding state, logical sites last.
      state = encoding_state(code.group, code.frame());
    } else {
      throw ValidationError(
          "lego '" + id + "' declares " + std::to_string(legs.size()) +
          " legs but its code has n=" + std::to_string(n) +
          ", k=" + std::to_string(k) +
          " (give n legs for the block itself or n+k legs for its encoding "
          "state)");
    }
    net.id_of.emplace(id, net.legos.size());
    net.legos.push_back(
        NetLego{std::move(id), std::move(*state), std::move(legs)});
  }

  net.roles.resize(net.legos.size());
  std::vector<std::vector<char>> assigned(net.legos.size());
  for (size_t i = 0; i < net.legos.size(); ++i) {
    net.roles[i].assign(net.legos[i].legs.size(), LegRole::contracted);
    assigned[i].assign(net.legos[i].legs.size(), 0);
  }
  auto claim = [&](size_t li, size_t si, LegRole role) {
    if (assigned[li][si])
      throw ValidationError("leg '" + net.leg_name(li, si) +
                            "' is used more than once across contract and "
                            "dangling lists");
    assigned[li][si] = 1;
    net.roles[li][si] = role;
  };

  if (doc.contains("contract")) {
    for (const nlohmann::json& ej : doc.at("contract")) {
      if (!ej.is_array() || ej.size() != 2)
        throw ValidationError("each contract entry must be a pair of leg "
                              "references");
      const std::string ra = ej.at(0).get<std::string>();
      const std::string rb = ej.at(1).get<std::string>();
      const auto [la, sa] = detail::resolve_leg_ref(ra, net);
      const auto [lb, sb] = detail::resolve_leg_ref(rb, net);
      if (la == lb && sa == sb)
        throw ValidationError("edge '" + ra + "~" + rb +
                              "' glues a leg to itself");
      claim(la, sa, LegRole::contracted);
      claim(lb, sb, LegRole::contracted);
      net.edges.push_back(NetEdge{la, sa, lb, sb, ra + "~" + rb});
    }
  }

  const nlohmann::json& dangling = doc.at("dangling");
  if (!dangling.is_object())
    throw ValidationError("'dangling' must be an object");
  if (dangling.contains("physical"))
    for (const nlohmann::json& rj : dangling.at("physical")) {
      const auto [li, si] = detail::resolve_leg_ref(rj.get<std::string>(), net);
      claim(li, si, LegRole::physical);
      net.physical.push_back(LegRef{li, si});
    }
  if (dangling.contains("logical"))
    for (const nlohmann::json& rj : dangling.at("logical")) {
      const auto [li, si] = detail::resolve_leg_ref(rj.get<std::string>(), net);
      claim(li, si, LegRole::logical);
      net.logical.push_back(LegRef{li, si});
    }

  for (size_t i = 0; i < net.legos.size(); ++i)
    for (size_t s = 0; s < net.legos[i].legs.size(); ++s)
      if (!assigned[i][s])
        throw ValidationError("leg '" + net.leg_name(i, s) +
                              "' is neither contracted nor dangling");

  if (doc.contains("expected_distance")) {
    const int d = doc.at("expected_distance").get<int>();
    if (d < 1)
      throw ValidationError("expected_distance must be a positive integer");
    if (net.scheme.kind != SchemeKind::shor_laflamme &&
        net.scheme.kind != SchemeKind::complete)
      throw ValidationError(
          "expected_distance needs a scheme that resolves site weights "
          "(shor-laflamme or complete)");
    net.expected_distance = d;
  }

  if (doc.contains("plan"))
    for (const nlohmann::json& sj : doc.at("plan"))
      net.doc_plan.push_back(sj.get<std::string>());

  net.incident.resize(net.legos.size());
  net.logical_legs_of.assign(net.legos.size(), 0);
  for (size_t e = 0; e < net.edges.size(); ++e) {
    net.incident[net.edges[e].lego_a].push_back(e);
    if (net.edges[e].lego_b != net.edges[e].lego_a)
      net.incident[net.edges[e].lego_b].push_back(e);
  }
  for (const LegRef& r : net.logical) ++net.logical_legs_of[r.lego];
  return net;
}

// ---- contraction plans -------------------------------------------------------

struct PlanStep {
  enum class Kind : uint8_t { intro, trace } kind = Kind::intro;
  size_t index = 0;  // lego index for intro, edge index for trace
  std::string text;  // "id" or "a.x~b.y"
};

struct ContractionPlan {
  std::vector<PlanStep> steps;
  int width = 0;  // maximum open legs across all pending components
};

namespace detail {

// Leg-count simulation shared by the planner and the plan validator.  A
// component's tracked legs are its pending edge endpoints plus its members'
// dangling logical legs; physical legs are folded into weight variables at
// birth and never count.
struct WidthSim {
  const Network* net;
  std::vector<int> comp;                    // per lego, -1 = not yet active
  std::vector<std::vector<size_t>> members; // per component id
  std::vector<char> fused;                  // per edge
  int total = 0, width = 0;
  size_t unfused, missing;

  explicit WidthSim(const Network& n)
      : net(&n),
        comp(n.legos.size(), -1),
        fused(n.edges.size(), 0),
        unfused(n.edges.size()),
        missing(n.legos.size()) {}

  bool done() const { return missing == 0 && unfused == 0; }

  int birth_legs(size_t li) const {
    int c = net->logical_legs_of[li];
    for (size_t e : net->incident[li])
      if (!fused[e])
        c += (net->edges[e].lego_a == li ? 1 : 0) +
             (net->edges[e].lego_b == li ? 1 : 0);
    return c;
  }

  int peek_intro(size_t li) const { return total + birth_legs(li); }

  int peek_trace(size_t e) const {
    if (fused[e]) return total;
    const NetEdge& ed = net->edges[e];
    std::vector<char> in_s(net->legos.size(), 0);
    auto mark = [&](size_t li) {
      if (comp[li] >= 0)
        for (size_t m : members[comp[li]]) in_s[m] = 1;
      else
        in_s[li] = 1;
    };
    mark(ed.lego_a);
    mark(ed.lego_b);
    int births = 0;
    if (comp[ed.lego_a] < 0) births += birth_legs(ed.lego_a);
    if (ed.lego_b != ed.lego_a && comp[ed.lego_b] < 0)
      births += birth_legs(ed.lego_b);
    int fusable = 0;
    for (size_t i = 0; i < net->edges.size(); ++i)
      if (!fused[i] && in_s[net->edges[i].lego_a] && in_s[net->edges[i].lego_b])
        ++fusable;
    return total + births - 2 * fusable;
  }

  void apply_intro(size_t li) {
    total += birth_legs(li);
    comp[li] = static_cast<int>(members.size());
    members.push_back({li});
    --missing;
    width = std::max(width, total);
  }

  void apply_trace(size_t e) {
    if (fused[e]) return;
    const NetEdge& ed = net->edges[e];
    int births = 0;
    if (comp[ed.lego_a] < 0) births += birth_legs(ed.lego_a);
    if (ed.lego_b != ed.lego_a && comp[ed.lego_b] < 0)
      births += birth_legs(ed.lego_b);
    std::vector<size_t> merged;
    auto absorb = [&](size_t li) {
      if (comp[li] >= 0) {
        std::vector<size_t>& m = members[comp[li]];
        merged.insert(merged.end(), m.begin(), m.end());
        m.clear();
      } else {
        merged.push_back(li);
        --missing;
      }
    };
    const int ca = comp[ed.lego_a], cb = comp[ed.lego_b];
    absorb(ed.lego_a);
    if (ed.lego_b != ed.lego_a && (cb < 0 || cb != ca)) absorb(ed.lego_b);
    const int nc = static_cast<int>(members.size());
    for (size_t m : merged) comp[m] = nc;
    members.push_back(std::move(merged));
    int fusable = 0;
    for (size_t i = 0; i < net->edges.size(); ++i)
      if (!fused[i] && comp[net->edges[i].lego_a] == nc &&
          comp[net->edges[i].lego_b] == nc) {
        fused[i] = 1;
        --unfused;
        ++fusable;
      }
    total += births - 2 * fusable;
    width = std::max(width, total);
  }
};

}  // namespace detail

// Replays the steps through the width simulation, rejecting plans that
// introduce a lego twice, never introduce one, or leave an edge untraced.
inline ContractionPlan seal_plan(const Network& net,
                                 std::vector<PlanStep> steps) {
  detail::WidthSim sim(net);
  for (const PlanStep& s : steps) {
    if (s.kind == PlanStep::Kind::intro) {
      if (sim.comp[s.index] >= 0)
        throw ValidationError("plan introduces '" + net.legos[s.index].id +
                              "' after it is already active");
      sim.apply_intro(s.index);
    } else {
      sim.apply_trace(s.index);
    }
  }
  if (sim.missing)
    for (size_t li = 0; li < net.legos.size(); ++li)
      if (sim.comp[li] < 0)
        throw ValidationError("plan never introduces lego '" +
                              net.legos[li].id + "'");
  if (sim.unfused)
    for (size_t e = 0; e < net.edges.size(); ++e)
      if (!sim.fused[e])
        throw ValidationError("plan leaves edge '" + net.edges[e].text +
                              "' untraced");
  return ContractionPlan{std::move(steps), sim.width};
}

enum class PlanMethod { greedy, input_order };

inline ContractionPlan plan_contraction(const Network& net,
                                        PlanMethod method = PlanMethod::greedy) {
  std::vector<PlanStep> steps;
  if (method == PlanMethod::input_order) {
    for (size_t li = 0; li < net.legos.size(); ++li)
      steps.push_back({PlanStep::Kind::intro, li, net.legos[li].id});
    for (size_t e = 0; e < net.edges.size(); ++e)
      steps.push_back({PlanStep::Kind::trace, e, net.edges[e].text});
    return seal_plan(net, std::move(steps));
  }
  // Greedy: always take the step whose resulting total open-leg count is
  // smallest; break ties by the lexicographically smallest (id, leg) key so
  // plans are reproducible across runs.
  detail::WidthSim sim(net);
  using Key = std::pair<std::string, std::string>;
  while (!sim.done()) {
    bool found = false, best_trace = false;
    int best_total = std::numeric_limits<int>::max();
    Key best_key;
    size_t best_idx = 0;
    auto consider = [&](int t, const Key& key, bool is_trace, size_t idx) {
      if (!found || t < best_total || (t == best_total && key < best_key)) {
        found = true;
        best_total = t;
        best_key = key;
        best_trace = is_trace;
        best_idx = idx;
      }
    };
    for (size_t li = 0; li < net.legos.size(); ++li)
      if (sim.comp[li] < 0)
        consider(sim.peek_intro(li), Key{net.legos[li].id, ""}, false, li);
    for (size_t e = 0; e < net.edges.size(); ++e) {
      if (sim.fused[e]) continue;
      const NetEdge& ed = net.edges[e];
      Key key = std::min(
          Key{net.legos[ed.lego_a].id, net.legos[ed.lego_a].legs[ed.site_a]},
          Key{net.legos[ed.lego_b].id, net.legos[ed.lego_b].legs[ed.site_b]});
      consider(sim.peek_trace(e), key, true, e);
    }
    if (best_trace) {
      sim.apply_trace(best_idx);
      steps.push_back(
          {PlanStep::Kind::trace, best_idx, net.edges[best_idx].text});
    } else {
      sim.apply_intro(best_idx);
      steps.push_back(
          {PlanStep::Kind::intro, best_idx, net.legos[best_idx].id});
    }
  }
  return seal_plan(net, std::move(steps));
}

// Resolves textual steps ("lego" or "a.x~b.y") against the network.
inline ContractionPlan plan_from_strings(const Network& net,
                                         const std::vector<std::string>& text) {
  std::map<std::pair<std::pair<size_t, size_t>, std::pair<size_t, size_t>>,
           size_t>
      edge_of;
  for (size_t e = 0; e < net.edges.size(); ++e) {
    std::pair<size_t, size_t> a{net.edges[e].lego_a, net.edges[e].site_a};
    std::pair<size_t, size_t> b{net.edges[e].lego_b, net.edges[e].site_b};
    edge_of[{std::min(a, b), std::max(a, b)}] = e;
  }
  std::vector<PlanStep> steps;
  for (const std::string& tok : text) {
    const auto tilde = tok.find('~');
    if (tilde == std::string::npos) {
      const auto it = net.id_of.find(tok);
      if (it == net.id_of.end())
        throw ValidationError("plan step '" + tok +
                              "' names an unknown lego");
      steps.push_back({PlanStep::Kind::intro, it->second, tok});
    } else {
      const auto a = detail::resolve_leg_ref(tok.substr(0, tilde), net);
      const auto b = detail::resolve_leg_ref(tok.substr(tilde + 1), net);
      const auto it = edge_of.find({std::min(a, b), std::max(a, b)});
      if (it == edge_of.end())
        throw ValidationError("plan step '" + tok +
                              "' traces an edge the network does not have");
      steps.push_back(
          {PlanStep::Kind::trace, it->second, net.edges[it->second].text});
    }
  }
  return seal_plan(net, std::move(steps));
}

// The document's own plan when it carries one, else greedy.
inline ContractionPlan default_plan(const Network& net) {
  if (!net.doc_plan.empty()) return plan_from_strings(net, net.doc_plan);
  return plan_contraction(net, PlanMethod::greedy);
}

// ---- the sparse contraction engine -------------------------------------------

struct ContractOptions {
  int threads = 1;  // <= 0 selects std::thread::hardware_concurrency()
  uint64_t mem_cap_bytes = uint64_t(2) << 30;
  uint64_t group_cap = StabilizerGroup::kDefaultGroupCap;
};

namespace engine {

template <typename C>
struct CoeffOps;

template <>
struct CoeffOps<BigInt> {
  static BigInt from_cyc(const Cyc& c) {
    const Rat& r = c.as_rational();  // loud when the value is not rational
    if (boost::multiprecision::denominator(r) != 1)
      throw ConsistencyError(
          "integer contraction path met a fractional coefficient");
    return boost::multiprecision::numerator(r);
  }
  static Cyc to_cyc(const BigInt& v, uint32_t q) { return Cyc(q, Rat(v)); }
  static BigInt one(uint32_t) { return BigInt(1); }
  static int64_t term_bytes(uint32_t) { return 48; }
};

template <>
struct CoeffOps<Cyc> {
  static Cyc from_cyc(const Cyc& c) { return c; }
  static Cyc to_cyc(const Cyc& v, uint32_t) { return v; }
  static Cyc one(uint32_t q) { return Cyc::one(q); }
  static int64_t term_bytes(uint32_t q) { return 56 + 16ll * q; }
};

inline bool coeff_zero(const BigInt& v) { return v.is_zero(); }
inline bool coeff_zero(const Cyc& v) { return v.is_zero(); }
inline void coeff_negate(BigInt& v) { v = -v; }
inline void coeff_negate(Cyc& v) { v = -v; }

// Rough live-size accounting so runaway contractions fail with a clear
// message instead of exhausting the machine.
struct MemGauge {
  std::atomic<int64_t> bytes{0};
  int64_t cap = 0;
  std::string step;

  void charge(int64_t delta) {
    const int64_t now =
        bytes.fetch_add(delta, std::memory_order_relaxed) + delta;
    if (delta > 0 && cap > 0 && now > cap)
      throw ResourceError(
          "contraction step '" + step + "' pushed the live tensor estimate to ~" +
          std::to_string(now) + " bytes; the cap is " + std::to_string(cap) +
          " bytes (raise the memory cap to proceed)");
  }
};

template <typename C>
using PolyVec = std::vector<std::pair<uint64_t, C>>;

// dst += scale * x^shift * src, all vectors sorted by packed key.
template <typename C>
void add_scaled(PolyVec<C>& dst, const PolyVec<C>& src, uint64_t shift,
                const C& scale, const ExpPacking& packing,
                PolyVec<C>& scratch) {
  if (src.empty() || coeff_zero(scale)) return;
  scratch.clear();
  scratch.reserve(dst.size() + src.size());
  size_t i = 0, j = 0;
  while (i < dst.size() && j < src.size()) {
    const uint64_t ks = packing.add(src[j].first, shift);
    if (dst[i].first < ks) {
      scratch.push_back(std::move(dst[i]));
      ++i;
    } else if (ks < dst[i].first) {
      C c = src[j].second;
      c *= scale;
      if (!coeff_zero(c)) scratch.emplace_back(ks, std::move(c));
      ++j;
    } else {
      C c = src[j].second;
      c *= scale;
      c += dst[i].second;
      if (!coeff_zero(c)) scratch.emplace_back(ks, std::move(c));
      ++i;
      ++j;
    }
  }
  for (; i < dst.size(); ++i) scratch.push_back(std::move(dst[i]));
  for (; j < src.size(); ++j) {
    C c = src[j].second;
    c *= scale;
    if (!coeff_zero(c))
      scratch.emplace_back(packing.add(src[j].first, shift), std::move(c));
  }
  dst.swap(scratch);
}

// dst += (-1)^negate * pa * pb.
template <typename C>
void accumulate_product(PolyVec<C>& dst, const PolyVec<C>& pa,
                        const PolyVec<C>& pb, bool negate,
                        const ExpPacking& packing, PolyVec<C>& scratch) {
  if (pa.empty() || pb.empty()) return;
  const PolyVec<C>& small = pa.size() <= pb.size() ? pa : pb;
  const PolyVec<C>& big = pa.size() <= pb.size() ? pb : pa;
  for (const auto& [k, c] : small) {
    C cc = c;
    if (negate) coeff_negate(cc);
    add_scaled(dst, big, k, cc, packing, scratch);
  }
}

// One pending component: a sparse (E, E') table over its open legs.  Leg ids
// are global (lego index, site) pairs; key layout is [E.x | E.z | E'.x | E'.z]
// with one byte per leg per segment.
template <typename C>
struct ETensor {
  std::vector<uint32_t> legs;
  std::map<std::vector<uint8_t>, PolyVec<C>> entries;
};

inline uint32_t leg_uid(size_t lego, size_t site) {
  return static_cast<uint32_t>((lego << 8) | site);
}

struct GluePos {
  size_t a = 0, b = 0;
};

inline size_t pos_of(const std::vector<uint32_t>& legs, uint32_t uid) {
  const auto it = std::find(legs.begin(), legs.end(), uid);
  if (it == legs.end())
    throw ConsistencyError("contraction lost track of an open leg");
  return static_cast<size_t>(it - legs.begin());
}

template <typename C>
int64_t tensor_cost(const ETensor<C>& t, uint32_t q) {
  int64_t terms = 0;
  for (const auto& e : t.entries) terms += static_cast<int64_t>(e.second.size());
  return terms * CoeffOps<C>::term_bytes(q) +
         static_cast<int64_t>(t.entries.size()) *
             (4 * static_cast<int64_t>(t.legs.size()) + 72);
}

template <typename C>
ETensor<C> birth(const Network& net, size_t li, uint64_t group_cap) {
  const NetLego& lego = net.legos[li];
  std::vector<std::string> open;
  ETensor<C> out;
  for (size_t s = 0; s < lego.legs.size(); ++s) {
    if (net.roles[li][s] == LegRole::physical) continue;
    open.push_back(lego.legs[s]);
    out.legs.push_back(leg_uid(li, s));
  }
  const TensorEnumerator t = from_lego(LegoBlock{lego.state, lego.legs}, open,
                                       net.scheme, group_cap);
  for (const auto& [key, poly] : t.entries) {
    PolyVec<C>& vec = out.entries[key];
    vec.reserve(poly.num_terms());
    for (const auto& [k, c] : poly.terms())
      vec.emplace_back(k, CoeffOps<C>::from_cyc(c));
  }
  return out;
}

// Matched contraction of every glued leg pair between two components.  An
// (E_A, E'_A) entry meets (E_B, E'_B) only when, on each glued pair, the B
// side carries the conjugate operator of the A side — for both E and E'
// independently.  For q = 2 the glue adds a -1 for every Y crossing it in
// E_A and in E'_A; odd q contributes no phase.
template <typename C>
ETensor<C> contract_pair(const ETensor<C>& A, const ETensor<C>& B,
                         const std::vector<GluePos>& glue, uint32_t q,
                         const ExpPacking& packing, MemGauge& gauge,
                         int threads) {
  const size_t la = A.legs.size(), lb = B.legs.size();
  std::vector<char> ina(la, 0), inb(lb, 0);
  for (const GluePos& g : glue) {
    ina[g.a] = 1;
    inb[g.b] = 1;
  }
  std::vector<size_t> ka, kb;
  for (size_t i = 0; i < la; ++i)
    if (!ina[i]) ka.push_back(i);
  for (size_t i = 0; i < lb; ++i)
    if (!inb[i]) kb.push_back(i);

  ETensor<C> out;
  for (size_t i : ka) out.legs.push_back(A.legs[i]);
  for (size_t i : kb) out.legs.push_back(B.legs[i]);
  const size_t lo = ka.size() + kb.size();

  using EntryRef = const std::pair<const std::vector<uint8_t>, PolyVec<C>>*;
  std::map<std::vector<uint8_t>, std::vector<EntryRef>> index;
  for (const auto& e : B.entries) {
    std::vector<uint8_t> sig(4 * glue.size());
    size_t p = 0;
    for (int seg = 0; seg < 2; ++seg) {
      for (const GluePos& g : glue) sig[p++] = e.first[lb * 2 * seg + g.b];
      for (const GluePos& g : glue)
        sig[p++] = static_cast<uint8_t>((q - e.first[lb * (2 * seg + 1) + g.b]) % q);
    }
    index[std::move(sig)].push_back(&e);
  }

  std::vector<EntryRef> a_items;
  a_items.reserve(A.entries.size());
  for (const auto& e : A.entries) a_items.push_back(&e);

  int T = threads <= 0
              ? static_cast<int>(std::max(1u, std::thread::hardware_concurrency()))
              : threads;
  T = std::max(1, std::min<int>(T, static_cast<int>(a_items.size())));

  auto process = [&](EntryRef ea,
                     std::map<std::vector<uint8_t>, PolyVec<C>>& dst,
                     PolyVec<C>& scratch) {
    std::vector<uint8_t> sig(4 * glue.size());
    size_t p = 0;
    for (int seg = 0; seg < 2; ++seg) {
      for (const GluePos& g : glue) sig[p++] = ea->first[la * 2 * seg + g.a];
      for (const GluePos& g : glue)
        sig[p++] = ea->first[la * (2 * seg + 1) + g.a];
    }
    const auto it = index.find(sig);
    if (it == index.end()) return;
    bool negate = false;
    if (q == 2) {
      int par = 0;
      for (const GluePos& g : glue) {
        par ^= ea->first[g.a] & ea->first[la + g.a];
        par ^= ea->first[2 * la + g.a] & ea->first[3 * la + g.a];
      }
      negate = par != 0;
    }
    std::vector<uint8_t> okey(4 * lo);
    for (int s4 = 0; s4 < 4; ++s4) {
      size_t po = lo * static_cast<size_t>(s4);
      for (size_t i : ka) okey[po++] = ea->first[la * static_cast<size_t>(s4) + i];
    }
    for (EntryRef eb : it->second) {
      for (int s4 = 0; s4 < 4; ++s4) {
        size_t po = lo * static_cast<size_t>(s4) + ka.size();
        for (size_t i : kb)
          okey[po++] = eb->first[lb * static_cast<size_t>(s4) + i];
      }
      auto [dit, fresh] = dst.try_emplace(okey);
      if (fresh) gauge.charge(static_cast<int64_t>(4 * lo) + 72);
      const size_t before = dit->second.size();
      accumulate_product(dit->second, ea->second, eb->second, negate, packing,
                         scratch);
      gauge.charge((static_cast<int64_t>(dit->second.size()) -
                    static_cast<int64_t>(before)) *
                   CoeffOps<C>::term_bytes(q));
    }
  };

  if (T == 1) {
    PolyVec<C> scratch;
    for (EntryRef ea : a_items) process(ea, out.entries, scratch);
    return out;
  }

  // Deterministic threading: round-robin partition, merge in thread order.
  // Addition of exact coefficients commutes, so the result never depends on
  // the thread count.
  std::vector<std::map<std::vector<uint8_t>, PolyVec<C>>> parts(T);
  std::vector<std::exception_ptr> errs(T);
  std::atomic<bool> bad{false};
  std::vector<std::thread> workers;
  for (int t = 0; t < T; ++t)
    workers.emplace_back([&, t]() {
      try {
        PolyVec<C> scratch;
        for (size_t i = t; i < a_items.size(); i += T) {
          if (bad.load(std::memory_order_relaxed)) return;
          process(a_items[i], parts[t], scratch);
        }
      } catch (...) {
        errs[t] = std::current_exception();
        bad.store(true, std::memory_order_relaxed);
      }
    });
  for (std::thread& w : workers) w.join();
  for (int t = 0; t < T; ++t)
    if (errs[t]) std::rethrow_exception(errs[t]);
  PolyVec<C> scratch;
  const C unit = CoeffOps<C>::one(q);
  for (int t = 0; t < T; ++t) {
    for (auto& [key, poly] : parts[t]) {
      auto [dit, fresh] = out.entries.try_emplace(key);
      if (fresh) {
        dit->second = std::move(poly);
      } else {
        const int64_t before = static_cast<int64_t>(dit->second.size());
        add_scaled(dit->second, poly, 0, unit, packing, scratch);
        gauge.charge((static_cast<int64_t>(dit->second.size()) - before -
                      static_cast<int64_t>(poly.size())) *
                     CoeffOps<C>::term_bytes(q));
      }
    }
    parts[t].clear();
  }
  return out;
}

// Traces leg pairs that are both inside one component (self-loops left after
// a fusion).  Same conjugation and sign rules as contract_pair.
template <typename C>
ETensor<C> project_internal(const ETensor<C>& A,
                            const std::vector<GluePos>& glue, uint32_t q,
                            const ExpPacking& packing, MemGauge& gauge) {
  const size_t la = A.legs.size();
  std::vector<char> drop(la, 0);
  for (const GluePos& g : glue) {
    drop[g.a] = 1;
    drop[g.b] = 1;
  }
  std::vector<size_t> keep;
  for (size_t i = 0; i < la; ++i)
    if (!drop[i]) keep.push_back(i);
  ETensor<C> out;
  for (size_t i : keep) out.legs.push_back(A.legs[i]);
  const size_t lo = keep.size();
  PolyVec<C> scratch;
  const C unit = CoeffOps<C>::one(q);
  for (const auto& [key, poly] : A.entries) {
    bool ok = true;
    for (int seg = 0; seg < 2 && ok; ++seg) {
      const size_t xo = la * 2 * static_cast<size_t>(seg);
      const size_t zo = xo + la;
      for (const GluePos& g : glue)
        if (key[xo + g.a] != key[xo + g.b] ||
            key[zo + g.b] != (q - key[zo + g.a]) % q) {
          ok = false;
          break;
        }
    }
    if (!ok) continue;
    C scale = unit;
    if (q == 2) {
      int par = 0;
      for (const GluePos& g : glue) {
        par ^= key[g.a] & key[la + g.a];
        par ^= key[2 * la + g.a] & key[3 * la + g.a];
      }
      if (par) coeff_negate(scale);
    }
    std::vector<uint8_t> okey(4 * lo);
    size_t po = 0;
    for (int s4 = 0; s4 < 4; ++s4)
      for (size_t i : keep) okey[po++] = key[la * static_cast<size_t>(s4) + i];
    auto [dit, fresh] = out.entries.try_emplace(std::move(okey));
    if (fresh) gauge.charge(static_cast<int64_t>(4 * lo) + 72);
    const int64_t before = static_cast<int64_t>(dit->second.size());
    add_scaled(dit->second, poly, 0, scale, packing, scratch);
    gauge.charge((static_cast<int64_t>(dit->second.size()) - before) *
                 CoeffOps<C>::term_bytes(q));
  }
  return out;
}

// Disconnected components combine as a plain tensor product.
template <typename C>
ETensor<C> tensor_product(const ETensor<C>& A, const ETensor<C>& B, uint32_t q,
                          const ExpPacking& packing, MemGauge& gauge) {
  ETensor<C> out;
  out.legs = A.legs;
  out.legs.insert(out.legs.end(), B.legs.begin(), B.legs.end());
  const size_t la = A.legs.size(), lb = B.legs.size(), lo = la + lb;
  PolyVec<C> scratch;
  for (const auto& ea : A.entries)
    for (const auto& eb : B.entries) {
      std::vector<uint8_t> okey(4 * lo);
      for (int s4 = 0; s4 < 4; ++s4) {
        const size_t s = static_cast<size_t>(s4);
        std::copy(ea.first.begin() + static_cast<std::ptrdiff_t>(la * s),
                  ea.first.begin() + static_cast<std::ptrdiff_t>(la * (s + 1)),
                  okey.begin() + static_cast<std::ptrdiff_t>(lo * s));
        std::copy(eb.first.begin() + static_cast<std::ptrdiff_t>(lb * s),
                  eb.first.begin() + static_cast<std::ptrdiff_t>(lb * (s + 1)),
                  okey.begin() + static_cast<std::ptrdiff_t>(lo * s + la));
      }
      auto [dit, fresh] = out.entries.try_emplace(std::move(okey));
      if (fresh) gauge.charge(static_cast<int64_t>(4 * lo) + 72);
      const int64_t before = static_cast<int64_t>(dit->second.size());
      accumulate_product(dit->second, ea.second, eb.second, false, packing,
                         scratch);
      gauge.charge((static_cast<int64_t>(dit->second.size()) - before) *
                   CoeffOps<C>::term_bytes(q));
    }
  return out;
}

template <typename C>
ETensor<C> permute_legs(ETensor<C> A, const std::vector<uint32_t>& target) {
  if (target == A.legs) return A;
  if (target.size() != A.legs.size())
    throw ConsistencyError(
        "open legs after contraction do not match the dangling logical legs");
  const size_t L = target.size();
  std::vector<size_t> src(L);
  for (size_t i = 0; i < L; ++i) src[i] = pos_of(A.legs, target[i]);
  ETensor<C> out;
  out.legs = target;
  for (auto& [key, poly] : A.entries) {
    std::vector<uint8_t> okey(4 * L);
    for (int s4 = 0; s4 < 4; ++s4)
      for (size_t i = 0; i < L; ++i)
        okey[L * static_cast<size_t>(s4) + i] =
            key[L * static_cast<size_t>(s4) + src[i]];
    out.entries.emplace(std::move(okey), std::move(poly));
  }
  return out;
}

template <typename C>
TensorEnumerator run(const Network& net, const ContractionPlan& plan,
                     const ContractOptions& opts) {
  const EnumPoly proto(net.scheme, true);
  const ExpPacking packing = proto.packing();
  const uint32_t q = net.q;
  MemGauge gauge;
  gauge.cap = static_cast<int64_t>(opts.mem_cap_bytes);

  std::vector<int> comp(net.legos.size(), -1);
  std::vector<std::vector<size_t>> members;
  std::vector<ETensor<C>> tensors;
  std::vector<char> alive;
  std::vector<char> fused(net.edges.size(), 0);
  int width = 0;

  auto ensure_born = [&](size_t li) {
    if (comp[li] >= 0) return;
    ETensor<C> t = birth<C>(net, li, opts.group_cap);
    gauge.charge(tensor_cost(t, q));
    comp[li] = static_cast<int>(tensors.size());
    tensors.push_back(std::move(t));
    members.push_back({li});
    alive.push_back(1);
  };
  auto kill = [&](int c) {
    gauge.charge(-tensor_cost(tensors[c], q));
    tensors[static_cast<size_t>(c)] = ETensor<C>{};
    alive[static_cast<size_t>(c)] = 0;
  };

  for (const PlanStep& step : plan.steps) {
    gauge.step = step.text;
    if (step.kind == PlanStep::Kind::intro) {
      ensure_born(step.index);
    } else if (!fused[step.index]) {
      const NetEdge& ed = net.edges[step.index];
      ensure_born(ed.lego_a);
      ensure_born(ed.lego_b);
      const int ca = comp[ed.lego_a], cb = comp[ed.lego_b];
      ETensor<C> t;
      std::vector<size_t> mem;
      if (ca != cb) {
        // Every pending edge between the two components fuses at once.
        std::vector<GluePos> glue;
        std::vector<size_t> fusing;
        for (size_t e = 0; e < net.edges.size(); ++e) {
          if (fused[e]) continue;
          const NetEdge& o = net.edges[e];
          uint32_t ua, ub;
          if (comp[o.lego_a] == ca && comp[o.lego_b] == cb) {
            ua = leg_uid(o.lego_a, o.site_a);
            ub = leg_uid(o.lego_b, o.site_b);
          } else if (comp[o.lego_a] == cb && comp[o.lego_b] == ca) {
            ua = leg_uid(o.lego_b, o.site_b);
            ub = leg_uid(o.lego_a, o.site_a);
          } else {
            continue;
          }
          glue.push_back(
              {pos_of(tensors[ca].legs, ua), pos_of(tensors[cb].legs, ub)});
          fusing.push_back(e);
        }
        t = contract_pair(tensors[ca], tensors[cb], glue, q, packing, gauge,
                          opts.threads);
        for (size_t e : fusing) fused[e] = 1;
        mem = members[ca];
        mem.insert(mem.end(), members[cb].begin(), members[cb].end());
        kill(ca);
        kill(cb);
      } else {
        t = std::move(tensors[ca]);
        mem = members[ca];
        alive[static_cast<size_t>(ca)] = 0;
      }
      // Remaining pending edges inside the merged bundle are self-loops now.
      std::vector<char> inb(net.legos.size(), 0);
      for (size_t m : mem) inb[m] = 1;
      std::vector<GluePos> internal;
      std::vector<size_t> fusing2;
      for (size_t e = 0; e < net.edges.size(); ++e) {
        if (fused[e]) continue;
        const NetEdge& o = net.edges[e];
        if (inb[o.lego_a] && inb[o.lego_b]) {
          internal.push_back({pos_of(t.legs, leg_uid(o.lego_a, o.site_a)),
                              pos_of(t.legs, leg_uid(o.lego_b, o.site_b))});
          fusing2.push_back(e);
        }
      }
      if (!internal.empty()) {
        ETensor<C> t2 = project_internal(t, internal, q, packing, gauge);
        gauge.charge(-tensor_cost(t, q));
        t = std::move(t2);
        for (size_t e : fusing2) fused[e] = 1;
      }
      const int nc = static_cast<int>(tensors.size());
      tensors.push_back(std::move(t));
      members.push_back(std::move(mem));
      alive.push_back(1);
      for (size_t m : members[static_cast<size_t>(nc)]) comp[m] = nc;
    }
    int total = 0;
    for (size_t c = 0; c < tensors.size(); ++c)
      if (alive[c]) total += static_cast<int>(tensors[c].legs.size());
    width = std::max(width, total);
  }

  if (width != plan.width)
    throw ConsistencyError("contraction ran at width " + std::to_string(width) +
                           " but the plan declared width " +
                           std::to_string(plan.width));

  // Fold surviving components in creation order.
  gauge.step = "combining components";
  std::optional<ETensor<C>> acc;
  for (size_t c = 0; c < tensors.size(); ++c) {
    if (!alive[c]) continue;
    if (!acc) {
      acc = std::move(tensors[c]);
    } else {
      ETensor<C> prod = tensor_product(*acc, tensors[c], q, packing, gauge);
      gauge.charge(-tensor_cost(*acc, q));
      gauge.charge(-tensor_cost(tensors[c], q));
      tensors[c] = ETensor<C>{};
      acc = std::move(prod);
    }
    alive[c] = 0;
  }
  if (!acc) throw ConsistencyError("contraction plan produced no tensor");

  std::vector<uint32_t> target;
  for (const LegRef& r : net.logical) target.push_back(leg_uid(r.lego, r.site));
  const ETensor<C> fin = permute_legs(std::move(*acc), target);

  TensorEnumerator out;
  out.scheme = net.scheme;
  for (uint32_t u : fin.legs)
    out.open_legs.push_back(net.leg_name(u >> 8, u & 0xff));
  for (const auto& [key, poly] : fin.entries) {
    EnumPoly p(net.scheme, true);
    for (const auto& [k, c] : poly) p.add_term_key(k, CoeffOps<C>::to_cyc(c, q));
    if (!p.is_zero()) out.entries.emplace(key, std::move(p));
  }
  return out;
}

}  // namespace engine

// Contracts the network along the plan.  The result is the raw (un-normalized)
// tensor enumerator over the dangling logical legs, identical for every valid
// plan; normalize_identity() brings it to the count convention.
inline TensorEnumerator contract_network(const Network& net,
                                         const ContractionPlan& plan,
                                         const ContractOptions& opts = {}) {
  if (net.q == 2) return engine::run<BigInt>(net, plan, opts);
  return engine::run<Cyc>(net, plan, opts);
}

// ---- whole-network reports ----------------------------------------------------

// The network's legos glued into one stabilizer group on the dangling sites.
struct MergedNetwork {
  StabilizerGroup group;
  std::vector<std::string> names;  // leg name per surviving site
};

inline MergedNetwork merge_network(const Network& net) {
  int64_t total = 0;
  std::vector<int64_t> offset(net.legos.size());
  for (size_t i = 0; i < net.legos.size(); ++i) {
    offset[i] = total;
    total += static_cast<int64_t>(net.legos[i].state.n());
  }
  std::vector<PhasedPauli> gens;
  for (size_t i = 0; i < net.legos.size(); ++i) {
    const StabilizerGroup& g = net.legos[i].state;
    for (const PhasedPauli& src : g.generators()) {
      PauliString u(net.q, static_cast<size_t>(total));
      for (size_t s = 0; s < g.n(); ++s) {
        u.x[static_cast<size_t>(offset[i]) + s] = src.u.x[s];
        u.z[static_cast<size_t>(offset[i]) + s] = src.u.z[s];
      }
      gens.emplace_back(std::move(u), src.phase);
    }
  }
  std::vector<std::pair<int64_t, int64_t>> edges;
  std::vector<std::string> labels;
  for (const NetEdge& e : net.edges) {
    edges.emplace_back(offset[e.lego_a] + static_cast<int64_t>(e.site_a),
                       offset[e.lego_b] + static_cast<int64_t>(e.site_b));
    labels.push_back(e.text);
  }
  MergeResult r = glue_sites(net.q, total, std::move(gens), edges, labels);
  MergedNetwork out{std::move(r.group), {}};
  for (int64_t s : r.kept_sites) {
    const size_t li = static_cast<size_t>(
        std::upper_bound(offset.begin(), offset.end(), s) - offset.begin() - 1);
    out.names.push_back(
        net.leg_name(li, static_cast<size_t>(s - offset[li])));
  }
  return out;
}

struct CodeReport {
  uint32_t q = 2;
  int n = 0;  // dangling physical legs
  int k = 0;  // dangling logical legs plus unfixed merged degrees of freedom
  WeightScheme scheme;
  EnumeratorPair pair;      // count convention
  std::optional<int> dist;  // only for schemes that resolve site weights
  ContractionPlan plan;
  TensorEnumerator tensor;  // identity-normalized
};

inline CodeReport code_report(const Network& net, const ContractionPlan& plan,
                              const ContractOptions& opts = {}) {
  CodeReport rep;
  rep.q = net.q;
  rep.scheme = net.scheme;
  rep.plan = plan;
  // The dense-free merge detects annihilation first and names the edge.
  const MergedNetwork merged = merge_network(net);
  rep.tensor = normalize_identity(contract_network(net, plan, opts));
  const int n_phys = static_cast<int>(net.physical.size());
  const int n_log = static_cast<int>(net.logical.size());
  const int rank = static_cast<int>(merged.group.num_generators());
  rep.n = n_phys;
  rep.k = n_log + (n_phys + n_log - rank);

  EnumPoly a(net.scheme, true);
  if (rep.tensor.rank() == 0) {
    a = scalar_value(rep.tensor);
  } else {
    const PauliString id(net.q, rep.tensor.rank());
    a = entry_of(rep.tensor, id, id);
  }
  EnumPoly b = apply_mw(a, n_phys);
  b.scale(q_power(net.q, rep.k));

  // When the merged group pins a pure state, the diagonal of the normalized
  // tensor must reproduce the transform route exactly.
  if (rank == n_phys + n_log && n_log > 0) {
    EnumPoly diag(net.scheme, true);
    const size_t L = rep.tensor.rank();
    for (const auto& [key, poly] : rep.tensor.entries) {
      bool diagonal = true;
      for (size_t i = 0; i < 2 * L && diagonal; ++i)
        diagonal = key[i] == key[2 * L + i];
      if (diagonal) diag.accumulate_scaled(poly, 0, Cyc::one(net.q));
    }
    if (!(diag == b))
      throw ConsistencyError(
          "diagonal sum of the contracted tensor disagrees with the "
          "transform of its identity entry");
  }

  rep.pair = EnumeratorPair{std::move(a), std::move(b), Convention::count,
                            net.q, n_phys, rep.k};
  if (net.scheme.kind == SchemeKind::shor_laflamme ||
      net.scheme.kind == SchemeKind::complete) {
    rep.dist = distance(rep.pair);
    if (net.expected_distance && *rep.dist != *net.expected_distance)
      throw ConsistencyError("network declares distance " +
                             std::to_string(*net.expected_distance) +
                             " but the contraction finds " +
                             std::to_string(*rep.dist));
  }
  return rep;
}

inline CodeReport code_report(const Network& net,
                              const ContractOptions& opts = {}) {
  return code_report(net, default_plan(net), opts);
}

}  // namespace qwe

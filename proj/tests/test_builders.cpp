#include "qwe/builders.hpp"

#include <gtest/gtest.h>

#include <map>
#include <random>
#include <string>
#include <vector>

#include "qwe/scalar_enum.hpp"
#include "qwe/stab_contract.hpp"
#include "qwe/stab_group.hpp"

using namespace qwe;
namespace qb = qwe::builders;
using nlohmann::json;

namespace {

int distance_of(const StabilizerGroup& g) {
  WeightScheme sl{SchemeKind::shor_laflamme, g.q()};
  auto d = distance(enumerators_by_counting(g, sl));
  return d ? *d : -1;
}

// Move site i of g to position perm[i].
StabilizerGroup permute_sites(const StabilizerGroup& g,
                              const std::vector<size_t>& perm) {
  std::vector<PhasedPauli> gens;
  for (const PhasedPauli& p : g.generators()) {
    PauliString u(g.q(), g.n());
    for (size_t i = 0; i < g.n(); ++i) {
      u.x[perm[i]] = p.u.x[i];
      u.z[perm[i]] = p.u.z[i];
    }
    gens.push_back(PhasedPauli(std::move(u), p.phase));
  }
  return StabilizerGroup(g.q(), g.n(), std::move(gens));
}

// Glue every edge of a network document symbolically; returns the merged
// group plus the dangling "id.leg" name per kept site, in site order.
struct MergedDoc {
  StabilizerGroup group;
  std::vector<std::string> names;
};

MergedDoc merge_doc(const json& doc) {
  const uint32_t q = doc.at("q").get<uint32_t>();
  std::map<std::string, int64_t> site_of;
  std::vector<std::string> name_of;
  std::vector<PhasedPauli> gens;
  int64_t total = 0;
  std::vector<std::pair<StabilizerGroup, int64_t>> blocks;
  for (const json& lego : doc.at("legos")) {
    StabCode code = code_from_json(lego.at("code"));
    const auto& legs = lego.at("legs");
    StabilizerGroup g =
        legs.size() == code.group.n() + static_cast<size_t>(code.group.k()) &&
                code.group.k() > 0
            ? encoding_state(code.group, code.frame())
            : code.group;
    EXPECT_EQ(legs.size(), g.n());
    const std::string id = lego.at("id").get<std::string>();
    for (const json& leg : legs) {
      site_of[id + "." + leg.get<std::string>()] = total;
      name_of.push_back(id + "." + leg.get<std::string>());
      ++total;
    }
    blocks.push_back({std::move(g), total - static_cast<int64_t>(legs.size())});
  }
  for (const auto& [g, offset] : blocks)
    for (const PhasedPauli& p : g.generators()) {
      PauliString u(q, static_cast<size_t>(total));
      for (size_t i = 0; i < g.n(); ++i) {
        u.x[offset + i] = p.u.x[i];
        u.z[offset + i] = p.u.z[i];
      }
      gens.push_back(PhasedPauli(std::move(u), p.phase));
    }
  std::vector<std::pair<int64_t, int64_t>> edges;
  for (const json& e : doc.at("contract"))
    edges.push_back({site_of.at(e.at(0).get<std::string>()),
                     site_of.at(e.at(1).get<std::string>())});
  MergeResult r = glue_sites(q, total, std::move(gens), edges);
  MergedDoc out{std::move(r.group), {}};
  for (int64_t s : r.kept_sites) out.names.push_back(name_of[s]);
  return out;
}

TEST(Codes, SmallCatalog) {
  auto c513 = qb::five_one_three_code();
  EXPECT_EQ(c513.group.n(), 5u);
  EXPECT_EQ(c513.group.k(), 1);
  EXPECT_EQ(distance_of(c513.group), 3);

  auto c422 = qb::four_two_two_code();
  EXPECT_EQ(c422.group.k(), 2);
  EXPECT_EQ(distance_of(c422.group), 2);

  auto c412 = qb::four_one_two_code();
  EXPECT_EQ(c412.group.k(), 1);
  EXPECT_EQ(distance_of(c412.group), 2);
  EXPECT_EQ(c412.frame().k(), 1u);  // frame synthesized on demand

  auto c512 = qb::five_one_two_code();
  EXPECT_EQ(c512.group.n(), 5u);
  EXPECT_EQ(distance_of(c512.group), 2);

  auto triv = qb::trivial_code(3, 2);
  EXPECT_EQ(triv.group.k(), 2);
  EXPECT_EQ(triv.frame().k(), 2u);
}

TEST(Codes, StatesAndFrames) {
  EXPECT_EQ(qb::bell_group().k(), 0);
  EXPECT_EQ(distance_of(qb::bell_group()), 2);
  EXPECT_EQ(distance_of(qb::bell_group(3)), 2);
  EXPECT_EQ(distance_of(qb::ghz_group(3)), 2);
  EXPECT_EQ(qb::zero_group().k(), 0);
  EXPECT_EQ(qb::plus_group().k(), 0);

  auto s604 = qb::six_zero_four_group();
  EXPECT_EQ(s604.n(), 6u);
  EXPECT_EQ(s604.k(), 0);
  EXPECT_EQ(distance_of(s604), 4);

  auto s603 = qb::six_zero_three_group();
  EXPECT_EQ(s603.n(), 6u);
  EXPECT_EQ(s603.k(), 0);
  EXPECT_EQ(distance_of(s603), 3);
}

TEST(Codes, PlanarFamily) {
  EXPECT_TRUE(same_group(qb::planar_code(2, 2).group,
                         qb::five_one_two_code().group));
  struct Want {
    size_t rows, cols, n;
    int d;
  };
  for (const Want& w : {Want{2, 3, 8, 2}, Want{3, 3, 13, 3}, Want{3, 4, 18, 3}}) {
    auto code = qb::planar_code(w.rows, w.cols);
    EXPECT_EQ(code.group.n(), w.n);
    EXPECT_EQ(code.group.k(), 1);
    EXPECT_EQ(distance_of(code.group), w.d) << w.rows << "x" << w.cols;
  }
  // 4x4 is [[25,1,4]]; counting out its distance is too slow here, but the
  // structure must check out.
  auto big = qb::planar_code(4, 4);
  EXPECT_EQ(big.group.n(), 25u);
  EXPECT_EQ(big.group.k(), 1);
  EXPECT_NO_THROW(validate_frame(big.group, *big.logical));
  EXPECT_THROW(qb::planar_code(0, 3), ValidationError);
}

TEST(Codes, RandomGroupsAreValid) {
  std::mt19937_64 rng(7);
  for (uint32_t q : {2u, 3u, 5u}) {
    auto g = qb::random_stabilizer_group(q, 4, 2, rng);
    EXPECT_EQ(g.q(), q);
    EXPECT_EQ(g.n(), 4u);
    EXPECT_EQ(g.num_generators(), 2u);  // construction validates the rest
  }
  EXPECT_THROW(qb::random_stabilizer_group(2, 2, 3, rng), ValidationError);
}

TEST(Networks, LegoJsonRoundTrip) {
  auto c = qb::five_one_three_code();
  json lego = qb::lego_json("t1", c.group, c.logical, {"a", "b", "c", "d", "e"});
  EXPECT_EQ(lego.at("id"), "t1");
  StabCode back = code_from_json(lego.at("code"));
  EXPECT_TRUE(same_group(back.group, c.group));
  ASSERT_TRUE(back.logical.has_value());
  EXPECT_EQ(phased_pauli_to_text(back.logical->pairs[0].first),
            phased_pauli_to_text(c.logical->pairs[0].first));
}

TEST(Networks, BellChainShape) {
  json doc = qb::bell_chain_network(4);
  EXPECT_EQ(doc.at("legos").size(), 4u);
  EXPECT_EQ(doc.at("contract").size(), 3u);
  EXPECT_EQ(doc.at("dangling").at("physical").size(), 2u);
  EXPECT_EQ(doc.at("dangling").at("logical").size(), 0u);
  MergedDoc m = merge_doc(doc);
  EXPECT_TRUE(same_group(m.group, qb::bell_group()));
  EXPECT_EQ(m.names, (std::vector<std::string>{"t1.p1", "t4.p2"}));
}

TEST(Networks, SurfaceShape) {
  json doc = qb::surface_network();
  EXPECT_EQ(doc.at("legos").size(), 6u);
  EXPECT_EQ(doc.at("contract").size(), 5u);
  EXPECT_EQ(doc.at("dangling").at("physical").size(), 25u);
  EXPECT_EQ(doc.at("dangling").at("logical").size(), 1u);
  EXPECT_EQ(doc.at("expected_distance"), 4);

  json twisted = qb::surface_network(true);
  EXPECT_NE(doc.at("legos").at(3).at("legs"),
            twisted.at("legos").at(3).at("legs"));
  twisted.at("legos").at(3).at("legs") = doc.at("legos").at(3).at("legs");
  EXPECT_EQ(doc, twisted);  // differs in exactly that one leg list

  // Both variants merge to valid 26-site stabilizer states.
  MergedDoc m = merge_doc(doc);
  EXPECT_EQ(m.group.n(), 26u);
  EXPECT_EQ(m.group.k(), 0);
  MergedDoc p = merge_doc(qb::surface_network(true));
  EXPECT_EQ(p.group.n(), 26u);
  EXPECT_EQ(p.group.k(), 0);
  EXPECT_FALSE(same_group(m.group, p.group));
}

TEST(Networks, HolographicShape) {
  json doc = qb::holographic_network();
  EXPECT_EQ(doc.at("legos").size(), 9u);
  EXPECT_EQ(doc.at("contract").size(), 12u);
  EXPECT_EQ(doc.at("dangling").at("physical").size(), 20u);
  EXPECT_EQ(doc.at("dangling").at("logical").size(), 0u);
  MergedDoc m = merge_doc(doc);
  EXPECT_EQ(m.group.n(), 20u);
  // five bulk degrees of freedom survive
  EXPECT_EQ(m.group.num_generators(), 15u);
}

TEST(Networks, StripColumnsAreStates) {
  json doc = qb::strip_network(3, 4);
  ASSERT_EQ(doc.at("legos").size(), 4u);
  EXPECT_EQ(doc.at("legos").at(0).at("id"), "c000");
  EXPECT_EQ(doc.at("legos").at(3).at("id"), "c003");
  for (const json& lego : doc.at("legos")) {
    StabCode code = code_from_json(lego.at("code"));
    EXPECT_EQ(code.group.k(), 0);
    EXPECT_EQ(lego.at("legs").size(), code.group.n());
  }
  EXPECT_EQ(doc.at("contract").size(), 9u);            // 3 rails x 3 seams
  EXPECT_EQ(doc.at("dangling").at("physical").size(), 18u);  // 12 + 6
  EXPECT_EQ(doc.at("dangling").at("logical"),
            json::array({"c000.logical"}));
  // The default scheme can't resolve a code distance, so the document must
  // not advertise one; the scalar scheme can and does.
  EXPECT_FALSE(doc.contains("expected_distance"));
  EXPECT_EQ(doc.at("scheme"), "double");
  json sl = qb::strip_network(3, 4, "shor-laflamme");
  EXPECT_EQ(sl.at("expected_distance"), 3);
  EXPECT_THROW(qb::strip_network(1, 5), ValidationError);
}

// The strip of column legos must glue into exactly the planar code's
// encoding state (same signs, not merely the same dimensions).
void check_strip_matches_planar(size_t rows, size_t cols) {
  MergedDoc m = merge_doc(qb::strip_network(rows, cols));
  auto planar = qb::planar_code(rows, cols);
  StabilizerGroup enc = encoding_state(planar.group, planar.frame());
  ASSERT_EQ(m.group.n(), enc.n());

  // site map: strip name -> planar encoding site
  const size_t n_primal = rows * cols;
  std::vector<size_t> perm(m.names.size());
  for (size_t s = 0; s < m.names.size(); ++s) {
    const std::string& name = m.names[s];
    const size_t dot = name.find('.');
    const size_t col = std::stoul(name.substr(1, dot - 1));
    const std::string leg = name.substr(dot + 1);
    if (leg == "logical") {
      perm[s] = n_primal + (rows - 1) * (cols - 1);
    } else {
      const size_t row = std::stoul(leg.substr(1));
      perm[s] = leg[0] == 'p' ? row * cols + col
                              : n_primal + row * (cols - 1) + col;
    }
  }
  EXPECT_TRUE(same_group(permute_sites(m.group, perm), enc))
      << rows << "x" << cols;
}

TEST(Networks, StripGluesIntoPlanarCode) {
  check_strip_matches_planar(2, 2);
  check_strip_matches_planar(2, 3);
  check_strip_matches_planar(3, 3);
  check_strip_matches_planar(3, 4);
  check_strip_matches_planar(4, 3);
}

TEST(Networks, RandomTwoLegoDocs) {
  std::mt19937_64 rng(42);
  for (int it = 0; it < 20; ++it) {
    qb::RandomNetwork net = qb::random_two_lego_network(2, rng);
    EXPECT_EQ(net.doc.at("legos").size(), 2u);
    const size_t e = net.doc.at("contract").size();
    EXPECT_GE(e, 1u);
    EXPECT_LE(e, 2u);
    EXPECT_EQ(net.doc.at("dangling").at("physical").size() + 2 * e,
              net.g1.n() + net.g2.n());
    StabCode c1 = code_from_json(net.doc.at("legos").at(0).at("code"));
    EXPECT_TRUE(same_group(c1.group, net.g1));
  }
}

}  // namespace

// Regenerates the bundled data/ tree: small reference codes plus the demo
// networks used by the CLI tests and the examples in the README.
//
// Usage: qwe_gen_data [output-root]   (default: ./data)

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <nlohmann/json.hpp>

#include "qwe/builders.hpp"
#include "qwe/stab_group.hpp"

using nlohmann::json;
using namespace qwe;
namespace qb = qwe::builders;
namespace fs = std::filesystem;

namespace {

void write_doc(const fs::path& path, const json& doc) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    std::cerr << "cannot write " << path << "\n";
    std::exit(1);
  }
  out << doc.dump(2) << "\n";
  std::cout << "wrote " << path.string() << "\n";
}

// The two [[5,1,2]] blocks glued back to back leave an [[8,2]] code with one
// logical leg per block; a small rank-2 tensor example.
json two_block_network() {
  const StabCode block = qb::five_one_two_code();
  const std::vector<std::string> legs{"p1", "p2", "p3", "p4", "p5", "l1"};
  json legos = json::array();
  legos.push_back(qb::lego_json("t1", block.group, block.logical, legs));
  legos.push_back(qb::lego_json("t2", block.group, block.logical, legs));
  json physical = json::array();
  for (int p = 1; p <= 4; ++p) physical.push_back("t1.p" + std::to_string(p));
  for (int p = 2; p <= 5; ++p) physical.push_back("t2.p" + std::to_string(p));
  return json{{"q", 2},
              {"scheme", "shor-laflamme"},
              {"legos", std::move(legos)},
              {"contract", json::array({json::array({"t1.p5", "t2.p1"})})},
              {"dangling",
               {{"physical", std::move(physical)},
                {"logical", {"t1.l1", "t2.l1"}}}}};
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::path("data");
  const fs::path codes = root / "codes";
  const fs::path networks = root / "networks";
  fs::create_directories(codes);
  fs::create_directories(networks);

  // ---- codes ---------------------------------------------------------------
  {
    const StabCode c = qb::five_one_three_code();
    write_doc(codes / "five_one_three.json", code_to_json(c.group, c.logical));
  }
  {
    const StabCode c = qb::four_two_two_code();
    write_doc(codes / "four_two_two.json", code_to_json(c.group, c.logical));
  }
  {
    const StabCode c = qb::four_one_two_code();
    write_doc(codes / "four_one_two.json", code_to_json(c.group, c.logical));
  }
  {
    const StabCode c = qb::five_one_two_code();
    write_doc(codes / "five_one_two.json", code_to_json(c.group, c.logical));
  }
  write_doc(codes / "six_zero_four.json", code_to_json(qb::six_zero_four_group()));
  write_doc(codes / "six_zero_three.json", code_to_json(qb::six_zero_three_group()));
  write_doc(codes / "bell.json", code_to_json(qb::bell_group(2)));
  write_doc(codes / "qutrit_bell.json", code_to_json(qb::bell_group(3)));
  write_doc(codes / "ghz3.json", code_to_json(qb::ghz_group(3)));
  write_doc(codes / "zero.json", code_to_json(qb::zero_group()));
  write_doc(codes / "plus.json", code_to_json(qb::plus_group()));
  {
    StabCode c = qb::trivial_code(2, 1);
    write_doc(codes / "trivial1.json", code_to_json(c.group, c.frame()));
  }

  // ---- networks ------------------------------------------------------------
  write_doc(networks / "bell_chain_4.json", qb::bell_chain_network(4));
  write_doc(networks / "two_five_one_two.json", two_block_network());
  write_doc(networks / "surface_5x5.json", qb::surface_network());
  write_doc(networks / "surface_5x5_perturbed.json", qb::surface_network(true));
  write_doc(networks / "strip_3x10.json", qb::strip_network(3, 10, "double"));
  write_doc(networks / "strip_3x30.json", qb::strip_network(3, 30, "double"));
  // The 150-column strip ships with the scalar scheme: its double enumerator
  // has more distinct terms than a small machine can hold in memory.
  write_doc(networks / "strip_3x150.json",
            qb::strip_network(3, 150, "shor-laflamme"));
  write_doc(networks / "holographic.json", qb::holographic_network());
  return 0;
}

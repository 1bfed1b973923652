// qwe — weight enumerator polynomials of stabilizer codes, computed either
// by direct group counting or by contracting a tensor network of legos.
//
// Subcommands: enumerate, contract, macwilliams, distance, oracle.
// Exit codes: 0 success, 2 input/validation error, 3 resource cap,
// 4 internal consistency failure.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qwe/dense_oracle.hpp"
#include "qwe/lego_network.hpp"
#include "qwe/macwilliams.hpp"
#include "qwe/scalar_enum.hpp"
#include "qwe/stab_group.hpp"

namespace {

using nlohmann::json;
using namespace qwe;

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open input file '" + path + "'");
  return json::parse(in);  // parse_error carries line/column
}

// Writes via a temporary in the same directory so readers never observe a
// partially written file.
void write_text_atomic(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw ValidationError("cannot write to '" + tmp.string() + "'");
    out << text;
    if (!out.flush())
      throw ResourceError("failed writing '" + tmp.string() + "'");
  }
  fs::rename(tmp, target);
}

void emit(const std::string& out_path, const json& doc) {
  const std::string text = doc.dump(2) + "\n";
  if (out_path.empty())
    std::cout << text;
  else
    write_text_atomic(out_path, text);
}

struct CommonOpts {
  std::string scheme;       // empty = command default / document value
  std::string convention = "count";
  std::string out_path;
  std::string csv_path;
  int threads = 0;  // <=0: all logical cores
};

void add_output_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--out", o.out_path, "write the JSON result to PATH");
  cmd->add_option("--csv", o.csv_path,
                  "write the A polynomial as CSV (weights, or a dx/dz matrix "
                  "for the double scheme)");
}

void add_threads_flag(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--threads", o.threads, "worker threads (default: all cores)")
      ->envname("QWE_THREADS");
}

WeightScheme scheme_for(const std::string& name, uint32_t q) {
  return WeightScheme{scheme_kind_from_name(name), q};
}

bool scalar_scheme(SchemeKind kind) {
  return kind == SchemeKind::shor_laflamme || kind == SchemeKind::complete;
}

// The shared JSON shape for a convention-adjusted enumerator pair; distance
// is reported for schemes that resolve site weights ("undetected" when no
// weight bounds the code).
json pair_json(const EnumeratorPair& count_pair, Convention target) {
  const EnumeratorPair out = with_convention(count_pair, target);
  json doc{{"q", out.q},
           {"n", out.n},
           {"k", out.k},
           {"scheme", scheme_kind_name(out.a.scheme().kind)},
           {"convention", convention_name(out.convention)},
           {"a", out.a.to_json()},
           {"b", out.b.to_json()}};
  if (scalar_scheme(out.a.scheme().kind)) {
    const std::optional<int> d = distance(count_pair);
    doc["distance"] = d ? json(*d) : json("undetected");
  }
  return doc;
}

void maybe_write_csv(const std::string& csv_path, const json& doc) {
  if (csv_path.empty()) return;
  const EnumPoly a = EnumPoly::from_json(doc.at("a"));
  write_text_atomic(csv_path, a.to_csv());
}

int cmd_enumerate(const std::string& input, const CommonOpts& o) {
  const StabCode code = code_from_json(read_json_file(input));
  const std::string scheme_name =
      o.scheme.empty() ? "shor-laflamme" : o.scheme;
  CountingOptions copts;
  copts.threads = o.threads;
  const EnumeratorPair pair = enumerators_by_counting(
      code.group, scheme_for(scheme_name, code.group.q()), copts);
  const json doc = pair_json(pair, convention_from_name(o.convention));
  maybe_write_csv(o.csv_path, doc);
  emit(o.out_path, doc);
  return 0;
}

int cmd_oracle(const std::string& input, const CommonOpts& o) {
  const StabCode code = code_from_json(read_json_file(input));
  const StabilizerGroup& g = code.group;
  size_t dim = 1;
  for (size_t i = 0; i < g.n(); ++i) {
    dim *= g.q();
    if (dim > kDenseOracleMaxDim)
      throw ValidationError(
          "the dense oracle is limited to q^n <= " +
          std::to_string(kDenseOracleMaxDim) + " (got n=" +
          std::to_string(g.n()) + ", q=" + std::to_string(g.q()) + ")");
  }
  const std::string scheme_name =
      o.scheme.empty() ? "shor-laflamme" : o.scheme;
  const DMat proj = projector_from_group(g);
  DenseOracleResult res = enumerators_dense_oracle(
      proj, proj, scheme_for(scheme_name, g.q()));
  res.pair.k = g.k();  // the oracle itself has no notion of k
  const EnumeratorPair count_pair =
      with_convention(res.pair, Convention::count);
  json doc = pair_json(count_pair, convention_from_name(o.convention));
  doc["residual"] = res.residual;
  maybe_write_csv(o.csv_path, doc);
  emit(o.out_path, doc);
  return 0;
}

int cmd_macwilliams(const std::string& input, const CommonOpts& o) {
  const json in = read_json_file(input);
  for (const char* field : {"q", "n", "k", "scheme", "convention", "a"})
    if (!in.contains(field))
      throw ValidationError(std::string("macwilliams input missing '") +
                            field + "'");
  const uint32_t q = in.at("q").get<uint32_t>();
  const int n = in.at("n").get<int>();
  const int k = in.at("k").get<int>();
  if (n < 0 || k < 0) throw ValidationError("macwilliams needs n, k >= 0");
  EnumPoly a = EnumPoly::from_json(in.at("a"));
  if (a.scheme().q != q)
    throw ValidationError("polynomial q does not match the document q");
  if (a.scheme().kind != scheme_kind_from_name(in.at("scheme").get<std::string>()))
    throw ValidationError("polynomial scheme does not match the document");
  if (!a.homogeneous()) a = a.homogenize(static_cast<uint64_t>(n));
  const Convention in_conv =
      convention_from_name(in.at("convention").get<std::string>());
  // Normalize to the count convention, transform, and express the result in
  // the input's convention.
  if (in_conv == Convention::raw) a.scale(q_power(q, -2 * k));
  EnumPoly b = apply_mw(a, n);
  b.scale(q_power(q, k));
  EnumeratorPair pair{std::move(a), std::move(b), Convention::count, q, n, k};
  const json doc = pair_json(pair, in_conv);
  maybe_write_csv(o.csv_path, doc);
  emit(o.out_path, doc);
  return 0;
}

ContractionPlan plan_for(const Network& net, const std::string& plan_opt) {
  if (plan_opt.empty()) return default_plan(net);
  if (plan_opt == "greedy") return plan_contraction(net, PlanMethod::greedy);
  if (plan_opt == "input-order")
    return plan_contraction(net, PlanMethod::input_order);
  // Otherwise a file: either a JSON array of steps or {"steps": [...]}.
  json doc = read_json_file(plan_opt);
  if (doc.is_object() && doc.contains("steps")) doc = doc.at("steps");
  if (!doc.is_array())
    throw ValidationError("plan file must hold an array of steps");
  std::vector<std::string> steps;
  for (const auto& s : doc) steps.push_back(s.get<std::string>());
  return plan_from_strings(net, steps);
}

int cmd_contract(const std::string& input, const CommonOpts& o,
                 const std::string& plan_opt, uint64_t mem_cap) {
  json doc = read_json_file(input);
  if (!o.scheme.empty()) {
    doc["scheme"] = o.scheme;
    // A document distance claim only carries over to site-weight schemes.
    if (!scalar_scheme(scheme_kind_from_name(o.scheme)))
      doc.erase("expected_distance");
  }
  const Network net = parse_network(doc);
  const ContractionPlan plan = plan_for(net, plan_opt);
  ContractOptions copts;
  copts.threads = o.threads;
  if (mem_cap) copts.mem_cap_bytes = mem_cap;
  const auto start = std::chrono::steady_clock::now();
  const CodeReport rep = code_report(net, plan, copts);
  const double ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - start)
                        .count();
  json out = pair_json(rep.pair, convention_from_name(o.convention));
  json steps = json::array();
  for (const PlanStep& s : rep.plan.steps) steps.push_back(s.text);
  out["plan"] = json{{"width", rep.plan.width}, {"steps", std::move(steps)}};
  out["timing_ms"] = ms;
  maybe_write_csv(o.csv_path, out);
  emit(o.out_path, out);
  return 0;
}

int cmd_distance(const std::string& input, const CommonOpts& o) {
  const json doc = read_json_file(input);
  json out;
  if (doc.contains("legos")) {
    json networked = doc;
    if (!doc.contains("scheme") ||
        !scalar_scheme(scheme_kind_from_name(doc.at("scheme").get<std::string>())))
      networked["scheme"] = "shor-laflamme";
    networked.erase("expected_distance");
    const Network net = parse_network(networked);
    ContractOptions copts;
    copts.threads = o.threads;
    const CodeReport rep = code_report(net, default_plan(net), copts);
    out = json{{"q", rep.q}, {"n", rep.n}, {"k", rep.k}};
    out["distance"] = rep.dist ? json(*rep.dist) : json("undetected");
  } else {
    const StabCode code = code_from_json(doc);
    CountingOptions copts;
    copts.threads = o.threads;
    const EnumeratorPair pair = enumerators_by_counting(
        code.group, scheme_for("shor-laflamme", code.group.q()), copts);
    const std::optional<int> d = distance(pair);
    out = json{{"q", pair.q}, {"n", pair.n}, {"k", pair.k}};
    out["distance"] = d ? json(*d) : json("undetected");
  }
  emit(o.out_path, out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "qwe: quantum weight enumerators of stabilizer codes, by direct "
      "counting or tensor-network contraction"};
  app.require_subcommand(1);

  CommonOpts enum_o, orc_o, mw_o, con_o, dist_o;
  std::string enum_in, orc_in, mw_in, con_in, dist_in;
  std::string plan_opt;
  uint64_t mem_cap = 0;

  CLI::App* enumerate =
      app.add_subcommand("enumerate", "enumerator pair of a code by counting");
  enumerate->add_option("input", enum_in, "code JSON file")->required();
  enumerate->add_option("--scheme", enum_o.scheme,
                        "shor-laflamme | double | refined-double | complete");
  enumerate->add_option("--convention", enum_o.convention, "count | raw");
  add_threads_flag(enumerate, enum_o);
  add_output_flags(enumerate, enum_o);

  CLI::App* contract = app.add_subcommand(
      "contract", "contract a lego network and report its code data");
  contract->add_option("input", con_in, "network JSON file")->required();
  contract->add_option("--scheme", con_o.scheme,
                       "override the document's weight scheme");
  contract->add_option("--convention", con_o.convention, "count | raw");
  contract->add_option("--plan", plan_opt,
                       "greedy | input-order | PATH to a steps file "
                       "(default: the document's plan, else greedy)");
  contract->add_option("--mem-cap", mem_cap,
                       "live-tensor memory cap in bytes");
  add_threads_flag(contract, con_o);
  add_output_flags(contract, con_o);

  CLI::App* macwilliams = app.add_subcommand(
      "macwilliams", "transform an enumerator JSON to its dual pair");
  macwilliams->add_option("input", mw_in, "enumerator JSON file")->required();
  add_output_flags(macwilliams, mw_o);

  CLI::App* dist = app.add_subcommand(
      "distance", "code distance of a code or network file");
  dist->add_option("input", dist_in, "code or network JSON file")->required();
  add_threads_flag(dist, dist_o);
  dist->add_option("--out", dist_o.out_path, "write the JSON result to PATH");

  CLI::App* oracle = app.add_subcommand(
      "oracle", "dense-matrix enumerators (independent check, small n only)");
  oracle->add_option("input", orc_in, "code JSON file")->required();
  oracle->add_option("--scheme", orc_o.scheme,
                     "shor-laflamme | double | refined-double | complete");
  oracle->add_option("--convention", orc_o.convention, "count | raw");
  add_output_flags(oracle, orc_o);

  CLI11_PARSE(app, argc, argv);

  try {
    if (enumerate->parsed()) return cmd_enumerate(enum_in, enum_o);
    if (contract->parsed())
      return cmd_contract(con_in, con_o, plan_opt, mem_cap);
    if (macwilliams->parsed()) return cmd_macwilliams(mw_in, mw_o);
    if (dist->parsed()) return cmd_distance(dist_in, dist_o);
    if (oracle->parsed()) return cmd_oracle(orc_in, orc_o);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ResourceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ConsistencyError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const json::parse_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::bad_alloc&) {
    std::cerr << "error: out of memory\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}

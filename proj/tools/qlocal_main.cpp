// qlocal command-line tool: routing, localization, verification, FT
// planning and Monte Carlo bound checks, with reproducible seeded runs.
//
// Exit codes: 0 pass, 1 statistical fail, 2 parse error, 3 precondition
// violation, 4 internal assertion.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>
#include <openssl/evp.h>

#include "qlocal/circuit_json.hpp"
#include "qlocal/errors.hpp"
#include "qlocal/ftarch.hpp"
#include "qlocal/localize.hpp"
#include "qlocal/noise.hpp"
#include "qlocal/routing.hpp"
#include "qlocal/stabsim.hpp"

namespace {

using nlohmann::json;
using namespace qlocal;

constexpr const char* kToolVersion = "qlocal 0.1.0";

// ---------------------------------------------------------------------------
// Small file / hashing helpers

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(fmt::format("cannot open '{}'", path));
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PreconditionError(fmt::format("cannot write '{}'", path));
  out << content;
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

struct RunConfig {
  std::string command;
  std::uint64_t seed = 0;
  std::uint64_t trials = 100000;
  double p = 0.0;
  double sigma = 3.0;
  std::uint32_t max_subset = 3;
  std::uint32_t subsets_per_size = 200;
  double tvd = 0.02;
  std::string mode;
  std::string in_path;
  std::string localized_path;
  std::string out_path;
  std::string stats_path;

  json echo() const {
    json j;
    j["command"] = command;
    j["seed"] = seed;
    j["trials"] = trials;
    j["p"] = p;
    j["sigma"] = sigma;
    j["max_subset"] = max_subset;
    j["subsets_per_size"] = subsets_per_size;
    j["tvd"] = tvd;
    j["mode"] = mode;
    j["in"] = in_path;
    if (!localized_path.empty()) j["localized"] = localized_path;
    j["out"] = out_path;
    if (!stats_path.empty()) j["stats"] = stats_path;
    return j;
  }
};

void emit_manifest(const RunConfig& config, const std::vector<std::string>& input_paths,
                   const std::vector<std::string>& output_paths) {
  if (config.out_path.empty()) return;
  json manifest;
  manifest["version"] = kToolVersion;
  manifest["config"] = config.echo();
  manifest["inputs"] = json::object();
  for (const auto& path : input_paths) {
    manifest["inputs"][path] = sha256_hex(read_file(path));
  }
  manifest["outputs"] = output_paths;
  write_file(config.out_path + ".manifest.json", manifest.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Pairing / path JSON formats

Vertex vertex_from_json(const json& j) {
  if (!j.is_array() || (j.size() != 2 && j.size() != 3)) {
    throw ParseError("coordinate must be an array of 2 or 3 integers");
  }
  Vertex v{j.at(0).get<int>(), j.at(1).get<int>(), j.size() == 3 ? j.at(2).get<int>() : 0};
  return v;
}

json vertex_to_json(const Vertex& v) { return json::array({v.x, v.y, v.z}); }

struct PairingFile {
  int L = 0;
  Pairing pairing;
};

PairingFile parse_pairing_file(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(fmt::format("pairing JSON parse failure: {}", e.what()));
  }
  try {
    PairingFile out;
    out.L = j.at("L").get<int>();
    for (const auto& jp : j.at("pairs")) {
      if (!jp.is_array() || jp.size() != 2) throw ParseError("each pair must be a 2-element array");
      out.pairing.pairs.emplace_back(vertex_from_json(jp.at(0)), vertex_from_json(jp.at(1)));
    }
    return out;
  } catch (const json::exception& e) {
    throw ParseError(fmt::format("pairing JSON structure error: {}", e.what()));
  }
}

json paths_to_json(const std::vector<RoutePath>& paths, int floors_used) {
  json j;
  j["paths"] = json::array();
  std::size_t max_len = 0;
  for (const auto& p : paths) {
    json jp = json::array();
    for (const auto& v : p.vertices) jp.push_back(vertex_to_json(v));
    j["paths"].push_back(std::move(jp));
    max_len = std::max(max_len, p.length());
  }
  j["stats"] = {{"path_count", paths.size()}, {"max_len", max_len}, {"floors_used", floors_used}};
  return j;
}

// ---------------------------------------------------------------------------
// FT plan JSON

json fine_to_json(const FineQubit& q) {
  return json{{"x", q.x}, {"y", q.y}, {"z", q.z}, {"color", color_name(q.color)}};
}

FineQubit fine_from_json(const json& j) {
  FineQubit q;
  q.x = j.at("x").get<std::int64_t>();
  q.y = j.at("y").get<std::int64_t>();
  q.z = j.at("z").get<std::int64_t>();
  std::string c = j.at("color").get<std::string>();
  q.color = c == "red" ? Color::Red : (c == "green" ? Color::Green : Color::Blue);
  return q;
}

json monomial_to_json(const NoiseMonomial& m) {
  return json{{"coeff_a", m.coeff_a}, {"exp_b", m.exp_b}, {"p0", m.p0}};
}

NoiseMonomial monomial_from_json(const json& j) {
  NoiseMonomial m;
  m.coeff_a = j.at("coeff_a").get<double>();
  m.exp_b = j.at("exp_b").get<double>();
  m.p0 = j.at("p0").get<double>();
  return m;
}

json plan_to_json(const FTPlan& plan) {
  json j;
  j["kind"] = "ft_plan";
  j["mode"] = plan.mode == FtMode::ThreeD ? "3d" : "quasi2d";
  j["L"] = plan.L;
  j["m"] = plan.m;
  j["lattice_qubits"] = plan.lattice_qubits;
  j["m_condition"] = {{"m", plan.m_condition.lhs},
                      {"rhs_log2", plan.m_condition.rhs_log2},
                      {"rhs_ln", plan.m_condition.rhs_ln},
                      {"ok_log2", plan.m_condition.ok_log2},
                      {"ok_ln", plan.m_condition.ok_ln}};
  j["stages"] = json::array();
  for (const auto& stage : plan.stages) {
    j["stages"].push_back({{"name", stage.name}, {"monomial", monomial_to_json(stage.monomial)}});
  }
  j["bell_noise"] = monomial_to_json(plan.bell_noise);
  j["paths"] = json::array();
  for (const auto& path : plan.paths) {
    json jp;
    jp["pair_index"] = path.pair_index;
    jp["out_a"] = fine_to_json(path.out_a);
    jp["out_b"] = fine_to_json(path.out_b);
    jp["buses"] = json::array();
    for (const auto& bus : path.buses) {
      jp["buses"].push_back({{"delta", bus.spec.delta},
                             {"R", bus.spec.R},
                             {"case", bus_case_name(bus.spec.kase)},
                             {"profile",
                              {{"p0", bus.spec.profile.p0},
                               {"coeff_a", bus.spec.profile.coeff_a},
                               {"exp_b", bus.spec.profile.exp_b},
                               {"r", bus.spec.profile.r},
                               {"r_tilde", bus.spec.profile.r_tilde}}},
                             {"axis", std::string(1, axis_name(bus.axis))},
                             {"color", color_name(bus.color)},
                             {"seg_start", vertex_to_json(bus.seg_start)},
                             {"seg_end", vertex_to_json(bus.seg_end)},
                             {"s", fine_to_json(bus.s_qubit)},
                             {"t", fine_to_json(bus.t_qubit)}});
    }
    jp["stitches"] = json::array();
    for (const auto& stitch : path.stitches) {
      jp["stitches"].push_back({{"a", fine_to_json(stitch.a)}, {"b", fine_to_json(stitch.b)}});
    }
    j["paths"].push_back(std::move(jp));
  }
  return j;
}

FTPlan plan_from_json(const json& j) {
  FTPlan plan;
  plan.mode = j.at("mode").get<std::string>() == "3d" ? FtMode::ThreeD : FtMode::Quasi2D;
  plan.L = j.at("L").get<int>();
  plan.m = j.at("m").get<int>();
  plan.lattice_qubits = j.at("lattice_qubits").get<std::uint64_t>();
  plan.bell_noise = monomial_from_json(j.at("bell_noise"));
  for (const auto& js : j.at("stages")) {
    plan.stages.push_back({js.at("name").get<std::string>(), monomial_from_json(js.at("monomial"))});
  }
  for (const auto& jp : j.at("paths")) {
    PathPlan path;
    path.pair_index = jp.at("pair_index").get<std::size_t>();
    path.out_a = fine_from_json(jp.at("out_a"));
    path.out_b = fine_from_json(jp.at("out_b"));
    for (const auto& jb : jp.at("buses")) {
      PositionedBus bus;
      bus.spec.delta = jb.at("delta").get<std::uint32_t>();
      bus.spec.R = jb.at("R").get<std::uint64_t>();
      std::string kase = jb.at("case").get<std::string>();
      bus.spec.kase = kase == "R2" ? BusCase::R2 : (kase == "ODD" ? BusCase::Odd : BusCase::Even);
      const auto& prof = jb.at("profile");
      bus.spec.profile =
          RobustnessProfile(prof.at("p0").get<double>(), prof.at("coeff_a").get<double>(),
                            prof.at("exp_b").get<double>(), prof.at("r").get<std::uint32_t>(),
                            prof.at("r_tilde").get<std::uint32_t>());
      std::string axis = jb.at("axis").get<std::string>();
      bus.axis = axis == "X" ? Axis::X : (axis == "Y" ? Axis::Y : Axis::Z);
      std::string color = jb.at("color").get<std::string>();
      bus.color = color == "red" ? Color::Red : (color == "green" ? Color::Green : Color::Blue);
      bus.seg_start = vertex_from_json(jb.at("seg_start"));
      bus.seg_end = vertex_from_json(jb.at("seg_end"));
      bus.s_qubit = fine_from_json(jb.at("s"));
      bus.t_qubit = fine_from_json(jb.at("t"));
      path.buses.push_back(std::move(bus));
    }
    for (const auto& js : jp.at("stitches")) {
      path.stitches.push_back({fine_from_json(js.at("a")), fine_from_json(js.at("b"))});
    }
    plan.paths.push_back(std::move(path));
  }
  return plan;
}

// ---------------------------------------------------------------------------
// Subcommand implementations

int cmd_route(const RunConfig& config, bool three_d) {
  PairingFile file = parse_pairing_file(read_file(config.in_path));
  json out;
  if (three_d) {
    auto segmented = route_3d(file.L, file.pairing);
    std::vector<RoutePath> paths;
    int floors = 0;
    for (const auto& sp : segmented) {
      paths.push_back(sp.concatenated());
      floors = std::max(floors, sp.floor);
    }
    auto report = verify_edge_disjoint(segmented);
    QLOCAL_ASSERT(report.ok);
    out = paths_to_json(paths, floors);
  } else {
    auto paths = route_2d(file.L, file.pairing);
    auto report = verify_edge_disjoint(paths);
    QLOCAL_ASSERT(report.ok);
    out = paths_to_json(paths, 0);
  }
  write_file(config.out_path, out.dump(2) + "\n");
  emit_manifest(config, {config.in_path}, {config.out_path});
  return 0;
}

int cmd_localize(const RunConfig& config) {
  AdaptiveCircuit circuit = parse_circuit(read_file(config.in_path));
  LocalizeMode mode;
  if (config.mode == "2d")
    mode = LocalizeMode::TwoD;
  else if (config.mode == "3d")
    mode = LocalizeMode::ThreeD;
  else
    throw PreconditionError(fmt::format("unknown localize mode '{}'", config.mode));
  LocalizedCircuit lc = localize_ideal(circuit, mode);
  auto violations = locality_check(lc);
  QLOCAL_ASSERT(violations.empty());
  write_file(config.out_path, serialize_circuit(lc.circuit));
  std::vector<std::string> outputs{config.out_path};
  if (!config.stats_path.empty()) {
    json stats;
    stats["mode"] = config.mode;
    stats["n_source"] = lc.stats.n_source;
    stats["n_padded"] = lc.stats.n_padded;
    stats["n_total"] = lc.stats.n_total;
    stats["source_depth"] = lc.stats.source_depth;
    stats["depth"] = lc.stats.depth;
    stats["max_path_length"] = lc.stats.max_path_length;
    stats["floors_used"] = lc.stats.floors_used;
    write_file(config.stats_path, stats.dump(2) + "\n");
    outputs.push_back(config.stats_path);
  }
  emit_manifest(config, {config.in_path}, outputs);
  return 0;
}

int cmd_verify(const RunConfig& config) {
  AdaptiveCircuit source = parse_circuit(read_file(config.in_path));
  AdaptiveCircuit localized = parse_circuit(read_file(config.localized_path));
  auto ids = source.outcome_ids();

  json verdict;
  verdict["ids"] = ids;
  bool pass = false;

  auto source_branches = run_all_branches(source);
  auto source_dist = marginal_distribution(source_branches, ids);

  std::string method;
  try {
    auto localized_branches = run_all_branches(localized);
    auto localized_dist = marginal_distribution(localized_branches, ids);
    method = "exact";
    pass = same_distribution(source_dist, localized_dist);
    if (!pass) {
      // Report the first mismatching marginal outcome.
      for (const auto& [key, num] : source_dist.weights) {
        auto it = localized_dist.weights.find(key);
        double ps = static_cast<double>(num) / std::pow(2.0, source_dist.log2_den);
        double pl = it == localized_dist.weights.end()
                        ? 0.0
                        : static_cast<double>(it->second) / std::pow(2.0, localized_dist.log2_den);
        if (std::abs(ps - pl) > 1e-12) {
          verdict["mismatch_outcome"] = key;
          verdict["source_prob"] = ps;
          verdict["localized_prob"] = pl;
          break;
        }
      }
    }
  } catch (const BranchBudgetExceeded&) {
    method = "statistical";
    Rng rng(config.seed);
    std::map<std::string, std::uint64_t> counts;
    for (std::uint64_t t = 0; t < config.trials; ++t) {
      auto result = run(localized, rng);
      counts[outcome_key(result.outcomes, ids)]++;
    }
    double tvd = tvd_against_counts(source_dist, counts, config.trials);
    verdict["tvd"] = tvd;
    verdict["tvd_threshold"] = config.tvd;
    pass = tvd < config.tvd;
    if (!pass) {
      // Name the outcome with the largest discrepancy.
      double worst = -1.0;
      std::string worst_key;
      for (const auto& [key, num] : source_dist.weights) {
        double ps = static_cast<double>(num) / std::pow(2.0, source_dist.log2_den);
        double pl = counts.count(key) ? counts[key] / static_cast<double>(config.trials) : 0.0;
        if (std::abs(ps - pl) > worst) {
          worst = std::abs(ps - pl);
          worst_key = key;
        }
      }
      verdict["mismatch_outcome"] = worst_key;
    }
  }
  verdict["method"] = method;
  verdict["pass"] = pass;
  write_file(config.out_path, verdict.dump(2) + "\n");
  emit_manifest(config, {config.in_path, config.localized_path}, {config.out_path});
  return pass ? 0 : 1;
}

int cmd_ft_plan(const RunConfig& config, std::uint32_t n) {
  FtMode mode;
  if (config.mode == "3d")
    mode = FtMode::ThreeD;
  else if (config.mode == "quasi2d")
    mode = FtMode::Quasi2D;
  else
    throw PreconditionError(fmt::format("unknown ft-plan mode '{}'", config.mode));
  // One canonical pairing layer stands in for a gadget round.
  CircuitBuilder b(n);
  b.add_layer(PrimOp::clifford1(CliffordGate::I, 0));
  FTLocalizedPlan plan = ft_localize(b.take(), mode);

  json j = plan_to_json(plan.layer_plans.at(0));
  j["n"] = plan.n_source;
  j["n_padded"] = plan.n_padded;
  j["qubit_total"] = plan.qubit_total;
  j["depth_constant"] = plan.depth_constant;
  j["pipeline"] = json::array();
  for (const auto& stage : plan.stages) {
    j["pipeline"].push_back({{"name", stage.name}, {"monomial", monomial_to_json(stage.monomial)}});
  }
  j["effective_noise"] = monomial_to_json(plan.effective_noise);
  write_file(config.out_path, j.dump(2) + "\n");
  emit_manifest(config, {}, {config.out_path});
  return 0;
}

struct SubsetRow {
  std::string label;
  std::uint32_t size;
  double empirical;
  double bound;
  double tolerance;
  bool pass;
};

std::string rows_to_csv(const std::vector<SubsetRow>& rows) {
  std::string csv = "trial_block,subset_size,subset,empirical_prob,bound,pass\n";
  for (const auto& row : rows) {
    csv += fmt::format("0,{},{},{:.12g},{:.12g},{}\n", row.size, row.label, row.empirical, row.bound,
                       row.pass ? 1 : 0);
  }
  return csv;
}

// Draws `subsets_per_size` sorted random subsets per size and measures
// empirical inclusion frequencies over the sampled supports.
std::vector<SubsetRow> subset_rows(const std::vector<PauliOp>& samples, std::uint32_t n,
                                   const std::string& prefix, double bound_base, const RunConfig& config,
                                   Rng& rng) {
  std::vector<SubsetRow> rows;
  for (std::uint32_t size = 1; size <= std::min(config.max_subset, n); ++size) {
    for (std::uint32_t s = 0; s < config.subsets_per_size; ++s) {
      std::vector<std::uint32_t> subset;
      while (subset.size() < size) {
        std::uint32_t q = rng.uniform_u32(n);
        if (std::find(subset.begin(), subset.end(), q) == subset.end()) subset.push_back(q);
      }
      std::sort(subset.begin(), subset.end());
      std::size_t hits = 0;
      for (const auto& e : samples) {
        bool all = true;
        for (auto q : subset) {
          if (!e.in_support(q)) {
            all = false;
            break;
          }
        }
        if (all) ++hits;
      }
      SubsetRow row;
      row.size = size;
      row.label = prefix;
      for (std::size_t i = 0; i < subset.size(); ++i) {
        row.label += (i ? "|" : "") + fmt::format("{}", subset[i]);
      }
      row.empirical = static_cast<double>(hits) / static_cast<double>(samples.size());
      row.bound = std::min(1.0, std::pow(bound_base, static_cast<double>(size)));
      row.tolerance =
          config.sigma * std::sqrt(row.bound * (1.0 - row.bound) / static_cast<double>(samples.size()));
      row.pass = row.empirical <= row.bound + row.tolerance;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

int cmd_montecarlo(const RunConfig& config) {
  json j;
  try {
    j = json::parse(read_file(config.in_path));
  } catch (const json::exception& e) {
    throw ParseError(fmt::format("plan JSON parse failure: {}", e.what()));
  }
  std::string kind;
  try {
    kind = j.at("kind").get<std::string>();
  } catch (const json::exception& e) {
    throw ParseError(fmt::format("plan JSON needs a 'kind': {}", e.what()));
  }

  Rng master(config.seed);
  Rng sampler = master.fork(0);
  Rng subset_rng = master.fork(1);
  std::vector<SubsetRow> rows;

  if (kind == "ft_plan") {
    FTPlan plan;
    try {
      plan = plan_from_json(j);
    } catch (const json::exception& e) {
      throw ParseError(fmt::format("ft_plan structure error: {}", e.what()));
    }
    std::uint32_t total_buses = 0;
    for (const auto& path : plan.paths) total_buses += static_cast<std::uint32_t>(path.buses.size());
    std::vector<PauliOp> deposits, outputs;
    deposits.reserve(config.trials);
    outputs.reserve(config.trials);
    for (std::uint64_t t = 0; t < config.trials; ++t) {
      PauliOp dep = PauliOp::identity(1);
      outputs.push_back(surrogate_failure_sample(plan, NoiseStrength(config.p), sampler, &dep));
      deposits.push_back(std::move(dep));
    }
    double pr_bound = parallel_repetition_bound(plan.bus_profiles(), NoiseStrength(config.p), true).p;
    auto bus_rows = subset_rows(deposits, 2 * total_buses, "bus:", pr_bound, config, subset_rng);
    rows.insert(rows.end(), bus_rows.begin(), bus_rows.end());
    double out_bound = plan.bell_noise.eval(config.p);
    auto out_rows =
        subset_rows(outputs, plan.output_qubit_count(), "out:", out_bound, config, subset_rng);
    rows.insert(rows.end(), out_rows.begin(), out_rows.end());
  } else if (kind == "swap_chain") {
    std::uint32_t k = j.at("k").get<std::uint32_t>();
    std::uint32_t ell = j.at("ell").get<std::uint32_t>();
    if (k < 2 || ell < 1) throw PreconditionError("swap_chain needs k >= 2 and ell >= 1");
    std::vector<PauliOp> effs;
    effs.reserve(config.trials);
    for (std::uint64_t t = 0; t < config.trials; ++t) {
      PauliOp eff = PauliOp::identity(2 * ell);
      for (std::uint32_t chain = 0; chain < ell; ++chain) {
        PauliOp deposit = sample_iid_noise(2 * k, NoiseStrength(config.p), sampler);
        PauliOp local = propagate_swap_chain(deposit, k);
        eff.set_x(2 * chain, local.x(0));
        eff.set_z(2 * chain, local.z(0));
        eff.set_x(2 * chain + 1, local.x(1));
        eff.set_z(2 * chain + 1, local.z(1));
      }
      effs.push_back(std::move(eff));
    }
    double bound = strength_entanglement_swap(NoiseStrength(config.p), k).p;
    rows = subset_rows(effs, 2 * ell, "", bound, config, subset_rng);
  } else if (kind == "iid") {
    std::uint32_t n = j.at("n").get<std::uint32_t>();
    double claimed = j.contains("claimed_p") ? j.at("claimed_p").get<double>() : config.p;
    std::vector<PauliOp> samples;
    samples.reserve(config.trials);
    for (std::uint64_t t = 0; t < config.trials; ++t) {
      samples.push_back(sample_iid_noise(n, NoiseStrength(config.p), sampler));
    }
    rows = subset_rows(samples, n, "", claimed, config, subset_rng);
  } else {
    throw ParseError(fmt::format("unknown plan kind '{}'", kind));
  }

  bool all_pass = true;
  for (const auto& row : rows) all_pass = all_pass && row.pass;
  write_file(config.out_path, rows_to_csv(rows));
  emit_manifest(config, {config.in_path}, {config.out_path});
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Localization transpiler and fault-tolerance planner for adaptive Clifford circuits"};
  app.require_subcommand(1);

  RunConfig config;
  std::uint32_t plan_n = 4;
  bool seed_given = false;

  auto add_common = [&](CLI::App* sub, bool needs_seed) {
    sub->add_option("--out", config.out_path, "Output path")->required();
    if (needs_seed) {
      sub->add_option("--seed", config.seed, "Master seed (required for stochastic runs)")
          ->required()
          ->each([&](const std::string&) { seed_given = true; });
      sub->add_option("--trials", config.trials, "Monte Carlo trials");
      sub->add_option("--sigma", config.sigma, "One-sided tolerance in binomial sigmas");
      sub->add_option("--max-subset", config.max_subset, "Largest tested subset size");
      sub->add_option("--subsets", config.subsets_per_size, "Random subsets per size");
    }
  };

  CLI::App* route2d = app.add_subcommand("route2d", "Edge-disjoint 2D routing of a pairing file");
  route2d->add_option("--in", config.in_path, "Pairing JSON")->required();
  add_common(route2d, false);

  CLI::App* route3d = app.add_subcommand("route3d", "Edge-disjoint 3D routing of a bottom-floor pairing");
  route3d->add_option("--in", config.in_path, "Pairing JSON")->required();
  add_common(route3d, false);

  CLI::App* localize = app.add_subcommand("localize", "Rewrite a circuit with geometrically local gates");
  localize->add_option("--in", config.in_path, "Circuit JSON")->required();
  localize->add_option("--mode", config.mode, "2d or 3d")->required();
  localize->add_option("--stats", config.stats_path, "Stats JSON output");
  add_common(localize, false);

  CLI::App* verify = app.add_subcommand("verify", "Check a localized circuit against its source");
  verify->add_option("--in", config.in_path, "Source circuit JSON")->required();
  verify->add_option("--localized", config.localized_path, "Localized circuit JSON")->required();
  verify->add_option("--seed", config.seed, "Sampling seed")->required();
  verify->add_option("--trials", config.trials, "Samples for the statistical path");
  verify->add_option("--tvd", config.tvd, "TVD threshold for the statistical path");
  verify->add_option("--out", config.out_path, "Verdict JSON")->required();

  CLI::App* ftplan = app.add_subcommand("ft-plan", "Fault-tolerant architecture plan for n qubits");
  ftplan->add_option("--mode", config.mode, "3d or quasi2d")->required();
  ftplan->add_option("--n", plan_n, "Computational qubit count")->required();
  add_common(ftplan, false);

  CLI::App* montecarlo = app.add_subcommand("montecarlo", "Surrogate sampling against closed-form bounds");
  montecarlo->add_option("--plan,--in", config.in_path, "Plan / gadget JSON")->required();
  montecarlo->add_option("--p", config.p, "Physical noise strength")->required();
  add_common(montecarlo, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (route2d->parsed()) {
      config.command = "route2d";
      return cmd_route(config, false);
    }
    if (route3d->parsed()) {
      config.command = "route3d";
      return cmd_route(config, true);
    }
    if (localize->parsed()) {
      config.command = "localize";
      return cmd_localize(config);
    }
    if (verify->parsed()) {
      config.command = "verify";
      return cmd_verify(config);
    }
    if (ftplan->parsed()) {
      config.command = "ft-plan";
      return cmd_ft_plan(config, plan_n);
    }
    if (montecarlo->parsed()) {
      config.command = "montecarlo";
      return cmd_montecarlo(config);
    }
  } catch (const ParseError& e) {
    fmt::print(stderr, "{}\n", json{{"error", "parse"}, {"message", e.what()}}.dump());
    return 2;
  } catch (const PreconditionError& e) {
    fmt::print(stderr, "{}\n", json{{"error", "precondition"}, {"message", e.what()}}.dump());
    return 3;
  } catch (const InternalError& e) {
    fmt::print(stderr, "{}\n", json{{"error", "internal"}, {"message", e.what()}}.dump());
    return 4;
  }
  return 2;
}

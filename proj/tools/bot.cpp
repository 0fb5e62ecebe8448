// bot: command-line front end for the branched optimal transport library.
//
//   bot ot      solve a transport instance (exact or Sinkhorn)
//   bot branch  one source, N random targets, greedy/tabu branching
//   bot net     many sources: transport plan, then one branched tree each
//   bot dual    artery/vein pair with frozen shift vectors
//   bot santa   geographic pole -> country -> region -> city hierarchy
//   bot render  Network-JSON files to SVG and/or GeoJSON
//
// Exit codes: 0 ok, 1 unexpected failure, 2 bad input or parameters,
// 3 numerical convergence failure, 4 structurally invalid network.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "bot/cities_csv.hpp"
#include "bot/geo.hpp"
#include "bot/harness.hpp"
#include "bot/network_json.hpp"
#include "bot/pipeline.hpp"
#include "bot/random.hpp"
#include "bot/render.hpp"

namespace fs = std::filesystem;
using namespace bot;

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kInput = 2, kConvergence = 3, kStructural = 4 };

struct RunConfig {
  double alpha = 0.5;
  std::string formula = "interp";
  std::uint64_t seed = 0;
  std::string ot_mode = "exact";
  double lambda = 0.01;
  double tol = 1e-9;
  std::size_t max_iter = 100000;
  double shift_norm = 0.0;
  double dual_shift_norm = 0.01;
  double shift_delta = 0.01;
  int dim = 2;
  std::size_t n_sources = 50;
  std::size_t n_targets = 100;
  unsigned workers = 0;
  bool nearest_only = false;
  std::string input;
  std::vector<std::string> inputs;
  std::string output;
  std::string output_dir = ".";
  std::string trace;
  std::string svg;
  std::string geojson;
  bool geographic = false;
  double pole_lat = 90.0;
  double pole_lon = 0.0;
};

BotParams make_params(const RunConfig& rc) {
  BotParams p;
  p.alpha = rc.alpha;
  const auto formula = parse_branch_formula(rc.formula);
  if (!formula) throw ParameterError("unknown formula '" + rc.formula + "' (expected interp or power)");
  p.formula = *formula;
  p.shift_norm = rc.shift_norm;
  p.shift_delta = rc.shift_delta;
  p.seed = rc.seed;
  p.validate();
  return p;
}

NetworkConfig make_network_config(const RunConfig& rc) {
  NetworkConfig cfg;
  const auto mode = parse_ot_mode(rc.ot_mode);
  if (!mode) throw ParameterError("unknown ot-mode '" + rc.ot_mode + "' (expected exact or sinkhorn)");
  cfg.ot_mode = *mode;
  cfg.sinkhorn.lambda = rc.lambda;
  cfg.sinkhorn.tol = rc.tol;
  cfg.sinkhorn.max_iter = rc.max_iter;
  cfg.sinkhorn.validate();
  cfg.workers = rc.workers;
  cfg.nearest_only = rc.nearest_only;
  return cfg;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << text;
  if (!out) throw InputError("write failed for " + path);
}

std::vector<Point> read_points(const nlohmann::json& arr, const char* what) {
  std::vector<Point> out;
  for (const auto& c : arr) {
    const auto v = c.get<std::vector<double>>();
    out.emplace_back(std::span<const double>(v));
  }
  if (out.empty()) throw InputError(std::string("instance has no ") + what);
  return out;
}

// {"sources": [[x, y], ...], "targets": [...], "p": [...], "q": [...]}
TransportInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open instance file " + path);
  try {
    const auto doc = nlohmann::json::parse(in);
    return TransportInstance(read_points(doc.at("sources"), "sources"), read_points(doc.at("targets"), "targets"),
                             doc.at("p").get<std::vector<double>>(), doc.at("q").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw InputError("malformed instance " + path + ": " + e.what());
  }
}

TransportInstance instance_for(const RunConfig& rc) {
  if (!rc.input.empty()) return load_instance(rc.input);
  return random_instance(rc.seed, rc.n_sources, rc.n_targets, rc.dim);
}

void write_svg(const std::string& path, std::span<const FlowTree> trees, const std::string& level, double alpha,
               bool geographic) {
  if (path.empty()) return;
  std::vector<LeveledTree> leveled;
  for (const FlowTree& t : trees) leveled.push_back({&t, level});
  SvgStyle style;
  style.alpha = alpha;
  style.geographic = geographic;
  write_text(path, render_svg(leveled, style));
}

void print_kv(const char* key, double value) { std::fprintf(stderr, "%s=%.10g\n", key, value); }
void print_kv(const char* key, std::size_t value) { std::fprintf(stderr, "%s=%zu\n", key, value); }

int run_ot(const RunConfig& rc) {
  const TransportInstance inst = instance_for(rc);
  const NetworkConfig cfg = make_network_config(rc);
  const Matrix cost = cost_matrix(inst);
  TransportPlan plan;
  double threshold = kExactThreshold;
  if (cfg.ot_mode == OtMode::exact) {
    ExactStats stats;
    plan = solve_exact(inst, cost, &stats);
    print_kv("pivots", stats.pivots);
  } else {
    SinkhornResult r = solve_sinkhorn(inst, cost, cfg.sinkhorn);
    print_kv("iterations", r.iterations);
    print_kv("row_error", r.row_error);
    print_kv("col_error", r.col_error);
    if (!r.converged) std::fprintf(stderr, "warning: Sinkhorn stopped at max-iter before reaching tol\n");
    plan = std::move(r.plan);
    threshold = kSinkhornThreshold;
  }
  const double c = plan_cost(plan, cost);
  print_kv("plan_cost", c);
  print_kv("support", plan.support_size(threshold));
  if (!rc.output.empty()) write_text(rc.output, dump_json(plan_to_json(inst, plan, c, threshold)));
  return kOk;
}

int run_branch(const RunConfig& rc) {
  const BotParams params = make_params(rc);
  BuildOptions options;
  options.nearest_only = rc.nearest_only;
  const SingleRun run = run_synthetic_single(rc.seed, rc.n_targets, params, rc.dim, options);
  print_kv("star_cost", run.build.cost_trace.front());
  print_kv("bot_cost", run.build.cost_trace.back());
  print_kv("insertions", run.build.insertions);
  print_kv("iterations", run.build.iterations);
  if (!rc.output.empty()) write_text(rc.output, dump_json(network_to_json(run.build.tree, params.alpha)));
  if (!rc.trace.empty()) {
    std::ostringstream out;
    write_cost_trace(out, run.build.cost_trace);
    write_text(rc.trace, out.str());
  }
  write_svg(rc.svg, std::span<const FlowTree>(&run.build.tree, 1), "network", params.alpha, false);
  return kOk;
}

int run_net(const RunConfig& rc) {
  const BotParams params = make_params(rc);
  const TransportInstance inst = instance_for(rc);
  const NetworkSolution sol = solve_network(inst, params, make_network_config(rc));
  print_kv("plan_cost", sol.report.plan_cost);
  print_kv("star_cost", sol.report.star_cost);
  print_kv("bot_cost", sol.report.bot_cost);
  print_kv("reduction", 1.0 - sol.report.bot_cost / sol.report.star_cost);
  print_kv("trees", sol.trees.size());
  print_kv("branch_nodes", sol.report.branch_nodes);
  if (!rc.output.empty()) write_text(rc.output, dump_json(network_to_json(sol.trees, params.alpha)));
  write_svg(rc.svg, sol.trees, "network", params.alpha, false);
  return kOk;
}

int run_dual(RunConfig rc) {
  rc.shift_norm = rc.dual_shift_norm;
  const BotParams params = make_params(rc);
  const OneToManyProblem problem = random_one_to_many(rc.seed, rc.n_targets, rc.dim);
  const DualNetwork d = dual_network(problem, params);
  print_kv("artery_cost", d.artery_cost);
  print_kv("vein_cost", d.vein_cost);
  const fs::path dir(rc.output_dir);
  fs::create_directories(dir);
  write_text((dir / "arteries.json").string(), dump_json(network_to_json(d.arteries, params.alpha)));
  write_text((dir / "veins.json").string(), dump_json(network_to_json(d.veins, params.alpha)));
  if (!rc.svg.empty()) {
    const std::vector<LeveledTree> trees{{&d.arteries, "arteries"}, {&d.veins, "veins"}};
    SvgStyle style;
    style.alpha = params.alpha;
    write_text(rc.svg, render_svg(trees, style));
  }
  return kOk;
}

int run_santa(const RunConfig& rc) {
  if (rc.input.empty()) throw InputError("santa needs --input <cities.csv>");
  const CityLoad load = load_cities_csv(fs::path(rc.input));
  print_kv("rows", load.report.rows);
  print_kv("loaded", load.report.loaded);
  print_kv("dropped", load.report.dropped);

  SantaConfig cfg;
  cfg.pole = {rc.pole_lat, rc.pole_lon};
  geo_embed(cfg.pole);  // range check
  cfg.params = make_params(rc);
  cfg.kmeans.seed = Rng(rc.seed).split("kmeans").seed();
  cfg.workers = rc.workers;
  const HierarchicalNetwork net = santa_pipeline(load.cities, cfg);

  const fs::path dir(rc.output_dir);
  fs::create_directories(dir);
  ordered_json manifest;
  manifest["pole"] = {{"lat", net.pole.lat}, {"lon", net.pole.lon}};
  manifest["alpha"] = net.alpha;
  manifest["seed"] = rc.seed;
  manifest["cities"] = {{"rows", load.report.rows}, {"loaded", load.report.loaded}, {"dropped", load.report.dropped}};
  ordered_json trees = ordered_json::array();
  double total_cost = 0.0;
  auto emit = [&](const FlowTree& tree, const std::string& file, const std::string& level, ordered_json extra) {
    const ordered_json doc = network_to_json(tree, net.alpha);
    write_text((dir / file).string(), dump_json(doc));
    ordered_json entry;
    entry["file"] = file;
    entry["level"] = level;
    for (auto& [k, v] : extra.items()) entry[k] = v;
    entry["cost"] = doc["cost"];
    total_cost += doc["cost"].get<double>();
    trees.push_back(std::move(entry));
  };

  double world = 0.0;
  for (const CountryNetwork& c : net.countries) world += c.population;
  emit(net.global_tree, "global.json", "global", ordered_json::object());
  std::vector<LeveledTree> leveled{{&net.global_tree, "global"}};
  char buf[64];
  for (std::size_t ci = 0; ci < net.countries.size(); ++ci) {
    const CountryNetwork& c = net.countries[ci];
    std::snprintf(buf, sizeof buf, "country-%03zu.json", ci);
    emit(c.tree, buf, "country",
         {{"country", c.country}, {"population", c.population}, {"population_share", c.population / world},
          {"k", c.k}});
    leveled.push_back({&c.tree, "country"});
    for (std::size_t ri = 0; ri < c.regions.size(); ++ri) {
      const RegionNetwork& r = c.regions[ri];
      std::snprintf(buf, sizeof buf, "region-%03zu-%03zu.json", ci, ri);
      emit(r.tree, buf, "region",
           {{"country", c.country},
            {"population", r.population},
            {"population_share", r.population / c.population},
            {"cities", r.cities.size()}});
      leveled.push_back({&r.tree, "region"});
    }
  }
  manifest["total_cost"] = total_cost;
  manifest["trees"] = std::move(trees);
  write_text((dir / "manifest.json").string(), dump_json(manifest));
  print_kv("countries", net.countries.size());
  print_kv("total_cost", total_cost);

  if (!rc.geojson.empty()) write_text(rc.geojson, render_geojson(leveled, true).dump() + "\n");
  if (!rc.svg.empty()) {
    SvgStyle style;
    style.alpha = net.alpha;
    style.geographic = true;
    write_text(rc.svg, render_svg(leveled, style));
  }
  return kOk;
}

int run_render(const RunConfig& rc) {
  if (rc.inputs.empty()) throw InputError("render needs at least one --input <network.json>");
  std::vector<FlowTree> trees;
  std::vector<std::string> levels;
  double alpha = rc.alpha;
  for (const std::string& path : rc.inputs) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw InputError("malformed network JSON " + path + ": " + e.what());
    }
    ParsedNetwork parsed = network_from_json(doc);
    alpha = parsed.alpha;
    for (FlowTree& t : parsed.trees) {
      trees.push_back(std::move(t));
      levels.push_back(fs::path(path).stem().string());
    }
  }
  std::vector<LeveledTree> leveled;
  for (std::size_t k = 0; k < trees.size(); ++k) leveled.push_back({&trees[k], levels[k]});
  if (rc.svg.empty() && rc.geojson.empty()) throw InputError("render needs --svg and/or --geojson");
  if (!rc.svg.empty()) {
    SvgStyle style;
    style.alpha = alpha;
    style.geographic = rc.geographic;
    write_text(rc.svg, render_svg(leveled, style));
  }
  if (!rc.geojson.empty()) write_text(rc.geojson, render_geojson(leveled, rc.geographic).dump() + "\n");
  print_kv("trees", trees.size());
  return kOk;
}

void add_seed(CLI::App* cmd, RunConfig& rc) {
  cmd->add_option("--seed", rc.seed, "Random seed")->envname("BOT_SEED");
}

void add_params(CLI::App* cmd, RunConfig& rc, double& shift_norm) {
  cmd->add_option("--alpha", rc.alpha, "Branching exponent in [0, 1]");
  cmd->add_option("--formula", rc.formula, "Branch point formula: interp or power");
  cmd->add_option("--shift-norm", shift_norm, "Norm of the frozen branch shift vector");
  cmd->add_option("--shift-delta", rc.shift_delta, "Shift damping constant");
  cmd->add_flag("--nearest-only", rc.nearest_only, "Only try the nearest partner per iteration");
}

void add_ot(CLI::App* cmd, RunConfig& rc) {
  cmd->add_option("--ot-mode", rc.ot_mode, "exact or sinkhorn");
  cmd->add_option("--lambda", rc.lambda, "Sinkhorn regularisation");
  cmd->add_option("--tol", rc.tol, "Sinkhorn marginal L1 tolerance");
  cmd->add_option("--max-iter", rc.max_iter, "Sinkhorn iteration cap");
}

void add_instance(CLI::App* cmd, RunConfig& rc) {
  cmd->add_option("--input", rc.input, "Instance JSON {sources, targets, p, q}; random when omitted");
  cmd->add_option("--n-sources", rc.n_sources, "Random instance: number of sources");
  cmd->add_option("--n-targets", rc.n_targets, "Random instance: number of targets");
  cmd->add_option("--dim", rc.dim, "Random instance: dimension (2 or 3)");
}

int dispatch(int argc, char** argv) {
  RunConfig rc;
  CLI::App app{"Branched optimal transport networks"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--workers", rc.workers, "Worker threads (0 = all cores)")->envname("BOT_WORKERS");

  auto* ot = app.add_subcommand("ot", "Solve a transport instance");
  add_seed(ot, rc);
  add_instance(ot, rc);
  add_ot(ot, rc);
  ot->add_option("--output,-o", rc.output, "Plan as Network-JSON");

  auto* branch = app.add_subcommand("branch", "Branched tree for one source and random targets");
  add_seed(branch, rc);
  add_params(branch, rc, rc.shift_norm);
  branch->add_option("--n-targets", rc.n_targets, "Number of targets");
  branch->add_option("--dim", rc.dim, "Dimension (2 or 3)");
  branch->add_option("--output,-o", rc.output, "Network-JSON output");
  branch->add_option("--trace", rc.trace, "Cost trace CSV output");
  branch->add_option("--svg", rc.svg, "SVG output");

  auto* net = app.add_subcommand("net", "Transport plan plus one branched tree per source");
  add_seed(net, rc);
  add_params(net, rc, rc.shift_norm);
  add_instance(net, rc);
  add_ot(net, rc);
  net->add_option("--output,-o", rc.output, "Network-JSON output");
  net->add_option("--svg", rc.svg, "SVG output");

  auto* dual = app.add_subcommand("dual", "Artery and vein trees over the same targets");
  add_seed(dual, rc);
  add_params(dual, rc, rc.dual_shift_norm);
  dual->add_option("--n-targets", rc.n_targets, "Number of targets");
  dual->add_option("--dim", rc.dim, "Dimension (2 or 3)");
  dual->add_option("--output-dir", rc.output_dir, "Directory for arteries.json and veins.json");
  dual->add_option("--svg", rc.svg, "SVG output");

  auto* santa = app.add_subcommand("santa", "Pole -> country -> region -> city hierarchy");
  add_seed(santa, rc);
  add_params(santa, rc, rc.shift_norm);
  santa->add_option("--input,-i", rc.input, "Cities CSV (city, country, lat, lng, population)")->required();
  santa->add_option("--output-dir", rc.output_dir, "Directory for tree files and manifest.json");
  santa->add_option("--pole-lat", rc.pole_lat, "Latitude of the global source");
  santa->add_option("--pole-lon", rc.pole_lon, "Longitude of the global source");
  santa->add_option("--geojson", rc.geojson, "GeoJSON output of every level");
  santa->add_option("--svg", rc.svg, "SVG output (lon/lat)");

  auto* render = app.add_subcommand("render", "Draw Network-JSON files");
  render->add_option("--input,-i", rc.inputs, "Network-JSON files")->required();
  render->add_option("--svg", rc.svg, "SVG output");
  render->add_option("--geojson", rc.geojson, "GeoJSON output");
  render->add_flag("--geographic", rc.geographic, "Coordinates are unit-sphere embeddings");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInput;
  }
  if (ot->parsed()) return run_ot(rc);
  if (branch->parsed()) return run_branch(rc);
  if (net->parsed()) return run_net(rc);
  if (dual->parsed()) return run_dual(rc);
  if (santa->parsed()) return run_santa(rc);
  return run_render(rc);
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const ConvergenceError& e) {
    std::fprintf(stderr, "convergence error: %s\n", e.what());
    return kConvergence;
  } catch (const StructuralError& e) {
    std::fprintf(stderr, "structural error: %s\n", e.what());
    return kStructural;
  } catch (const ParameterError& e) {
    std::fprintf(stderr, "parameter error: %s\n", e.what());
    return kInput;
  } catch (const InputError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kInput;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFailure;
  }
}

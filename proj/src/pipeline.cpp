#include "bot/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include "bot/random.hpp"

namespace bot {

void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& task) {
  if (count == 0) return;
  unsigned threads = workers ? workers : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t k = 0; k < count; ++k) task(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < count; k = next++) {
          try {
            task(k);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = count;
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

std::string_view to_string(OtMode mode) { return mode == OtMode::exact ? "exact" : "sinkhorn"; }

std::optional<OtMode> parse_ot_mode(std::string_view text) {
  if (text == "exact") return OtMode::exact;
  if (text == "sinkhorn") return OtMode::sinkhorn;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Multi-source decomposition

NetworkSolution solve_network(const TransportInstance& instance, const BotParams& params, const NetworkConfig& cfg) {
  params.validate();
  const Matrix cost = cost_matrix(instance);

  NetworkSolution solution;
  double threshold = kExactThreshold;
  if (cfg.ot_mode == OtMode::exact) {
    solution.plan = solve_exact(instance, cost);
  } else {
    SinkhornResult sr = solve_sinkhorn(instance, cost, cfg.sinkhorn);
    solution.plan = sr.plan;
    solution.report.sinkhorn = std::move(sr);
    threshold = kSinkhornThreshold;
  }
  if (cfg.threshold) threshold = *cfg.threshold;
  solution.report.plan_cost = plan_cost(solution.plan, cost);

  const auto assignments = plan_to_assignments(solution.plan, threshold);
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i].empty()) continue;
    solution.source_index.push_back(i);
    std::vector<std::size_t> targets;
    for (const Assignment& a : assignments[i]) targets.push_back(a.target);
    solution.tree_targets.push_back(std::move(targets));
  }

  const std::size_t count = solution.source_index.size();
  std::vector<BuildResult> builds(count);
  std::vector<double> stars(count);
  BuildOptions options;
  options.nearest_only = cfg.nearest_only;
  parallel_for(count, cfg.workers, [&](std::size_t t) {
    const std::size_t i = solution.source_index[t];
    OneToManyProblem problem;
    problem.source = instance.sources()[i];
    for (const Assignment& a : assignments[i]) {
      problem.targets.push_back(instance.targets()[a.target]);
      problem.areas.push_back(a.area);
    }
    BotParams local = params;
    local.seed = Rng(params.seed).split("source-" + std::to_string(i)).seed();
    stars[t] = star_cost(problem, params.alpha);
    builds[t] = build_one_to_many(problem, local, options);
  });

  for (std::size_t t = 0; t < count; ++t) {
    solution.report.star_cost += stars[t];
    solution.report.bot_cost += builds[t].cost_trace.back();
    solution.report.insertions += builds[t].insertions;
    solution.report.branch_nodes += builds[t].tree.count(NodeKind::branch);
    solution.trees.push_back(std::move(builds[t].tree));
  }
  return solution;
}

// ---------------------------------------------------------------------------
// Artery / vein pair

DualNetwork dual_network(const OneToManyProblem& problem, const BotParams& params) {
  params.validate();
  problem.validate();
  const Rng root(params.seed);
  BotParams artery = params;
  BotParams vein = params;
  artery.seed = root.split("arteries").seed();
  vein.seed = root.split("veins").seed();

  DualNetwork out;
  const int dim = problem.source.dim();
  BuildOptions artery_opts;
  BuildOptions vein_opts;
  if (params.shift_norm > 0.0) {
    artery_opts.shift = draw_shift(dim, params.shift_norm, artery.seed);
    vein_opts.shift = draw_shift(dim, params.shift_norm, vein.seed);
  }
  out.artery_shift = artery_opts.shift.value_or(Point::zero(dim));
  out.vein_shift = vein_opts.shift.value_or(Point::zero(dim));

  BuildResult a = build_one_to_many(problem, artery, artery_opts);
  BuildResult v = build_one_to_many(problem, vein, vein_opts);
  out.artery_cost = a.cost_trace.back();
  out.vein_cost = v.cost_trace.back();
  out.arteries = std::move(a.tree);
  out.veins = std::move(v.tree);
  return out;
}

// ---------------------------------------------------------------------------
// Geographic hierarchy

void GeoCity::validate() const {
  if (!(lat >= -90.0 && lat <= 90.0)) throw ParameterError("city latitude out of range: " + name);
  if (!(lon >= -180.0 && lon <= 180.0)) throw ParameterError("city longitude out of range: " + name);
  if (!(population > 0.0) || !std::isfinite(population)) throw ParameterError("city population must be positive: " + name);
  if (country.empty()) throw ParameterError("city without a country tag: " + name);
}

namespace {

Point on_sphere(const Point& p) {
  const double r = norm(p);
  if (!(r > 0.0)) throw ParameterError("population centroid sits at the sphere's center");
  return p / r;
}

FlowTree build_geo_tree(const Point& root, std::vector<Point> targets, const std::vector<double>& weights,
                        const BotParams& params) {
  double total = 0.0;
  for (double w : weights) total += w;
  OneToManyProblem problem;
  problem.source = root;
  problem.targets = std::move(targets);
  for (double w : weights) problem.areas.push_back(w / total);
  BuildOptions options;
  options.on_sphere = true;
  return build_one_to_many(problem, params, options).tree;
}

CountryNetwork build_country(const std::string& name, const std::vector<GeoCity>& cities,
                             const std::vector<std::size_t>& members, const SantaConfig& cfg) {
  CountryNetwork out;
  out.country = name;
  WeightedPointSet set;
  for (std::size_t idx : members) {
    set.points.push_back(geo_embed(cities[idx].lat, cities[idx].lon));
    set.weights.push_back(cities[idx].population);
    out.population += cities[idx].population;
  }
  out.center = on_sphere(weighted_centroid(set));
  out.k = choose_k(members.size());

  KMeansConfig km = cfg.kmeans;
  km.seed = Rng(cfg.kmeans.seed).split("country-" + name).seed();
  const KMeansResult clusters = weighted_kmeans(set, out.k, km);

  std::vector<std::vector<std::size_t>> groups(out.k);
  for (std::size_t m = 0; m < members.size(); ++m) groups[clusters.labels[m]].push_back(m);

  BotParams params = cfg.params;
  std::vector<Point> region_centers;
  std::vector<double> region_weights;
  for (std::size_t c = 0; c < out.k; ++c) {
    if (groups[c].empty()) continue;
    RegionNetwork region;
    std::vector<Point> targets;
    std::vector<double> weights;
    for (std::size_t m : groups[c]) {
      region.cities.push_back(members[m]);
      targets.push_back(set.points[m]);
      weights.push_back(set.weights[m]);
      region.population += set.weights[m];
    }
    region.center = on_sphere(clusters.centroids[c]);
    params.seed = Rng(cfg.params.seed).split(name + "/region-" + std::to_string(c)).seed();
    region.tree = build_geo_tree(region.center, std::move(targets), weights, params);
    region_centers.push_back(region.center);
    region_weights.push_back(region.population);
    out.regions.push_back(std::move(region));
  }
  params.seed = Rng(cfg.params.seed).split(name).seed();
  out.tree = build_geo_tree(out.center, std::move(region_centers), region_weights, params);
  return out;
}

}  // namespace

HierarchicalNetwork santa_pipeline(const std::vector<GeoCity>& cities, const SantaConfig& cfg) {
  if (cities.empty()) throw ParameterError("santa pipeline needs at least one city");
  cfg.params.validate();
  for (const GeoCity& city : cities) city.validate();

  std::map<std::string, std::vector<std::size_t>> by_country;
  for (std::size_t idx = 0; idx < cities.size(); ++idx) by_country[cities[idx].country].push_back(idx);

  std::vector<const std::string*> names;
  std::vector<const std::vector<std::size_t>*> members;
  for (const auto& [name, list] : by_country) {
    names.push_back(&name);
    members.push_back(&list);
  }

  HierarchicalNetwork net;
  net.pole = cfg.pole;
  net.alpha = cfg.params.alpha;
  net.countries.resize(names.size());
  parallel_for(names.size(), cfg.workers, [&](std::size_t c) {
    net.countries[c] = build_country(*names[c], cities, *members[c], cfg);
  });

  std::vector<Point> centers;
  std::vector<double> populations;
  for (const CountryNetwork& country : net.countries) {
    centers.push_back(country.center);
    populations.push_back(country.population);
  }
  BotParams params = cfg.params;
  params.seed = Rng(cfg.params.seed).split("global").seed();
  net.global_tree = build_geo_tree(geo_embed(cfg.pole), std::move(centers), populations, params);
  return net;
}

}  // namespace bot

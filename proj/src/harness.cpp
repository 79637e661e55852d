#include "zealot/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "zealot/cobra_sim.hpp"
#include "zealot/event_log.hpp"
#include "zealot/forward_sim.hpp"
#include "zealot/rng.hpp"

namespace zealot::harness {

namespace {

using nlohmann::json;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) ok = true;
    if (!ok)
      throw std::invalid_argument("config: unknown key '" + it.key() + "' in " + where);
  }
}

DegreeDist dist_from_json(const json& j) {
  std::map<int, double> atoms;
  for (auto it = j.begin(); it != j.end(); ++it)
    atoms[std::stoi(it.key())] = it.value().get<double>();
  return DegreeDist(atoms);
}

json dist_to_json(const DegreeDist& d) {
  json out = json::object();
  for (auto [deg, q] : d.atoms()) out[std::to_string(deg)] = q;
  return out;
}

TreeSpec tree_from_json(const json& j) {
  check_keys(j, {"type", "degree", "depth", "atoms"}, "tree");
  const std::string type = j.at("type").get<std::string>();
  if (type == "regular")
    return TreeSpec::regular(j.at("degree").get<int>(), j.at("depth").get<int>());
  if (type == "gw")
    return TreeSpec::galton_watson(dist_from_json(j.at("atoms")), j.at("depth").get<int>());
  throw std::invalid_argument("config: tree type must be 'regular' or 'gw'");
}

json tree_to_json(const TreeSpec& spec) {
  json out;
  if (auto* r = std::get_if<TreeSpec::Regular>(&spec.spec)) {
    out["type"] = "regular";
    out["degree"] = r->degree;
    out["depth"] = r->depth;
  } else {
    const auto& g = std::get<TreeSpec::GaltonWatson>(spec.spec);
    out["type"] = "gw";
    out["atoms"] = dist_to_json(g.dist);
    out["depth"] = g.depth;
  }
  return out;
}

thresholds::GraphSpec graph_from_json(const json& j) {
  check_keys(j, {"type", "degree", "atoms"}, "graph");
  const std::string type = j.at("type").get<std::string>();
  if (type == "regular") return j.at("degree").get<int>();
  if (type == "gw") return dist_from_json(j.at("atoms"));
  throw std::invalid_argument("config: graph type must be 'regular' or 'gw'");
}

json graph_to_json(const thresholds::GraphSpec& g) {
  json out;
  if (const int* d = std::get_if<int>(&g)) {
    out["type"] = "regular";
    out["degree"] = *d;
  } else {
    out["type"] = "gw";
    out["atoms"] = dist_to_json(std::get<DegreeDist>(g));
  }
  return out;
}

std::vector<double> grid_from_json(const json& j, const std::string& where) {
  if (j.is_array()) return j.get<std::vector<double>>();
  check_keys(j, {"from", "to", "step"}, where);
  const double from = j.at("from").get<double>();
  const double to = j.at("to").get<double>();
  const double step = j.at("step").get<double>();
  if (!(step > 0.0)) throw std::invalid_argument("config: grid step must be > 0 in " + where);
  std::vector<double> out;
  for (double v = from; v <= to + step * 0.5; v += step) out.push_back(v);
  return out;
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

json estimate_to_json(const Estimate& e) {
  json out;
  out["point"] = e.point;
  out["half_width"] = e.degenerate ? json() : json(e.half_width);
  out["replicas"] = e.replicas;
  out["seed"] = e.seed;
  out["boundary_fraction"] = e.boundary_fraction;
  if (e.degenerate) out["degenerate"] = true;
  return out;
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

ResultRecord make_record(const ExperimentConfig& cfg, std::string metric, double value,
                         std::optional<Estimate> est = std::nullopt) {
  ResultRecord rec;
  rec.digest = cfg.digest();
  rec.metric = std::move(metric);
  rec.value = value;
  rec.estimate = std::move(est);
  return rec;
}

void write_outputs(const ExperimentConfig& cfg, const std::string& csv,
                   const std::vector<ResultRecord>& records, const json& extra,
                   double wall_ms) {
  if (!cfg.out) return;
  write_text_atomic(*cfg.out + ".csv", csv);
  json summary;
  summary["schema"] = 1;
  summary["kind"] = cfg.kind;
  summary["config"] = cfg.to_json();
  summary["config_digest"] = cfg.digest();
  summary["wall_ms"] = wall_ms;
  json recs = json::array();
  for (const auto& r : records) recs.push_back(r.to_json());
  summary["records"] = recs;
  for (auto it = extra.begin(); it != extra.end(); ++it) summary[it.key()] = it.value();
  write_text_atomic(*cfg.out + ".json", summary.dump(2) + "\n");
}

const ExperimentConfig& require(const ExperimentConfig& cfg, bool has, const char* what) {
  if (!has) throw std::invalid_argument(std::string("config: '") + what + "' is required for " +
                                        cfg.kind);
  return cfg;
}

std::vector<ResultRecord> run_forward(const ExperimentConfig& cfg) {
  require(cfg, cfg.tree.has_value(), "tree");
  require(cfg, cfg.params.has_value(), "params");
  if (!(cfg.horizon > 0.0)) throw std::invalid_argument("config: horizon must be > 0");
  Timer timer;

  InitSpec init = cfg.init == "all" ? InitSpec::from_all() : InitSpec::from_root();
  Estimate surv = survival_probability(*cfg.tree, *cfg.params, init, cfg.horizon,
                                       cfg.replicas, cfg.seed);

  // trajectory of replica 0 for the CSV
  Tree tree = cfg.tree->make(replicate_seeds(cfg.seed ^ 0x74726565ull, 0));
  ForwardSimulator sim(tree, *cfg.params);
  ForwardOptions opts;
  opts.sample_dt = cfg.sample_dt;
  ForwardTrajectory traj =
      sim.run(init.resolve(tree), cfg.horizon, replicate_seeds(cfg.seed, 0), opts);
  std::string csv = "t,count,root_state\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i)
    csv += fmt17(traj.times[i]) + "," + std::to_string(traj.counts[i]) + "," +
           std::to_string(int(traj.root_state[i])) + "\n";

  std::vector<ResultRecord> records;
  records.push_back(make_record(cfg, "survival_probability", surv.point, surv));
  records.back().flags["truncation_warning"] = surv.boundary_fraction > 0.2;
  records.back().wall_ms = timer.ms();
  write_outputs(cfg, csv, records, json::object(), timer.ms());
  return records;
}

std::vector<ResultRecord> run_cobra(const ExperimentConfig& cfg) {
  require(cfg, cfg.tree.has_value(), "tree");
  require(cfg, cfg.params.has_value(), "params");
  if (!(cfg.horizon > 0.0)) throw std::invalid_argument("config: horizon must be > 0");
  Timer timer;

  Estimate local = local_survival_frequency(*cfg.tree, *cfg.params, cfg.horizon, cfg.replicas,
                                            cfg.seed, cfg.window_start);

  Tree tree = cfg.tree->make(replicate_seeds(cfg.seed ^ 0x74726565ull, 0));
  CobraSimulator sim(tree, *cfg.params);
  CobraOptions opts;
  opts.sample_dt = cfg.sample_dt;
  CobraResult res = sim.run(VertexSet{tree.root()}, cfg.horizon, replicate_seeds(cfg.seed, 0),
                            opts);
  std::string csv = "t,particle_count,root_visits\n";
  for (std::size_t i = 0; i < res.traj.times.size(); ++i)
    csv += fmt17(res.traj.times[i]) + "," + std::to_string(res.traj.counts[i]) + "," +
           std::to_string(res.traj.root_visits[i]) + "\n";

  std::vector<ResultRecord> records;
  records.push_back(make_record(cfg, "local_survival_frequency", local.point, local));
  records.back().flags["truncation_warning"] = local.boundary_fraction > 0.2;
  records.back().wall_ms = timer.ms();
  write_outputs(cfg, csv, records, json::object(), timer.ms());
  return records;
}

std::vector<ResultRecord> run_duality_check(const ExperimentConfig& cfg) {
  Timer timer;
  const double horizon_max = cfg.horizon > 0.0 ? cfg.horizon : 1.5;
  std::uint32_t duality_pass = 0, additivity_pass = 0, truncated = 0;
  std::string csv = "instance,tree,t,duality,additivity,truncated\n";

  for (std::uint32_t i = 0; i < cfg.instances; ++i) {
    Rng rng(replicate_seeds(cfg.seed, i));
    auto make_tree = [&]() -> std::pair<Tree, std::string> {
      switch (i % 3) {
        case 0:
          return {Tree::regular(3, cfg.depth), "regular3"};
        case 1:
          return {Tree::regular(4, cfg.depth), "regular4"};
        default:
          return {Tree::galton_watson(DegreeDist({{3, 0.5}, {4, 0.5}}), cfg.depth, rng.next()),
                  "gw34"};
      }
    };
    auto [tree, label] = make_tree();
    // Dirichlet(1,..,1) pick distribution on {0..3}
    std::vector<double> w(4);
    double sum = 0.0;
    for (double& v : w) {
      v = rng.exponential(1.0);
      sum += v;
    }
    for (double& v : w) v /= sum;
    ModelParams params(w);

    const double t = 0.5 + (horizon_max - 0.5) * rng.uniform01();
    EventLog log(tree, params, t, rng.next());

    // random nonempty sets with a 3-level margin to the boundary
    std::vector<VertexId> shallow;
    for (VertexId v = 0; v < tree.size(); ++v)
      if (tree.level(v) <= std::max(0, cfg.depth - 3)) shallow.push_back(v);
    auto pick_set = [&]() {
      std::vector<VertexId> ids;
      for (VertexId v : shallow)
        if (rng.uniform01() < 0.3) ids.push_back(v);
      if (ids.empty()) ids.push_back(shallow[rng.below(static_cast<std::uint32_t>(shallow.size()))]);
      return VertexSet(std::move(ids));
    };
    VertexSet a = pick_set(), b = pick_set();

    DualityCheck dc = check_duality(log, a, b, t);
    std::vector<VertexSet> parts;
    for (VertexId v : a) parts.push_back(VertexSet{v});
    AdditivityCheck ac = check_additivity(log, parts, t);

    const bool dual_ok = dc.forward_hit == dc.dual_hit;
    if (dual_ok) ++duality_pass;
    if (ac.equal) ++additivity_pass;
    if (dc.truncated) ++truncated;
    csv += std::to_string(i) + "," + label + "," + fmt_short(t) + "," +
           std::to_string(int(dual_ok)) + "," + std::to_string(int(ac.equal)) + "," +
           std::to_string(int(dc.truncated)) + "\n";
  }

  std::vector<ResultRecord> records;
  records.push_back(make_record(cfg, "duality_pass_fraction",
                                double(duality_pass) / cfg.instances));
  records.push_back(make_record(cfg, "additivity_pass_fraction",
                                double(additivity_pass) / cfg.instances));
  records.push_back(make_record(cfg, "truncated_fraction", double(truncated) / cfg.instances));
  for (auto& r : records) r.wall_ms = timer.ms();
  write_outputs(cfg, csv, records, json::object(), timer.ms());
  return records;
}

std::vector<ResultRecord> run_thresholds(const ExperimentConfig& cfg) {
  require(cfg, cfg.graph.has_value(), "graph");
  require(cfg, cfg.params.has_value(), "params");
  Timer timer;
  thresholds::ThresholdReport rep = thresholds::classify(*cfg.graph, *cfg.params);

  std::string csv = "criterion,applicable,satisfied,label,margin\n";
  std::vector<ResultRecord> records;
  for (const auto& c : rep.criteria) {
    csv += c.name + "," + std::to_string(int(c.applicable)) + "," +
           std::to_string(int(c.satisfied)) + "," + thresholds::regime_name(c.label) + "," +
           fmt_short(c.margin) + "\n";
    records.push_back(make_record(cfg, "criterion:" + c.name, c.margin));
  }

  json extra;
  extra["gamma"] = rep.gamma;
  if (rep.extinction_margin) extra["extinction_margin"] = *rep.extinction_margin;
  if (rep.local_dieout) extra["local_dieout_bound"] = *rep.local_dieout;
  if (rep.local_survival) extra["local_survival_bound"] = *rep.local_survival;
  if (rep.local_interval)
    extra["local_interval"] = json::array({rep.local_interval->first, rep.local_interval->second});
  if (rep.nu) {
    json nu;
    nu["mu"] = rep.nu->mu;
    nu["m0"] = rep.nu->m0;
    nu["mprime0"] = rep.nu->mprime0;
    nu["nu0"] = rep.nu->nu0;
    nu["minimizer"] = std::isfinite(rep.nu->minimizer) ? json(rep.nu->minimizer) : json("inf");
    if (rep.nu->theta_bar) nu["theta_bar"] = *rep.nu->theta_bar;
    nu["local_survival"] = rep.nu->local_survival;
    extra["nu"] = nu;
  }
  for (auto& r : records) r.wall_ms = timer.ms();
  write_outputs(cfg, csv, records, extra, timer.ms());
  return records;
}

std::vector<ResultRecord> run_nu0_scan(const ExperimentConfig& cfg) {
  if (cfg.q3_values.empty()) throw std::invalid_argument("config: nu0-scan needs q3 values");
  if (!(cfg.mu > 0.0)) throw std::invalid_argument("config: nu0-scan needs mu");
  Timer timer;
  std::string csv = "q3,mu,nu0,flag\n";
  std::optional<double> crossing;
  std::vector<ResultRecord> records;
  for (double q3 : cfg.q3_values) {
    DegreeDist dist =
        q3 >= 1.0 ? DegreeDist::single(3) : DegreeDist({{3, q3}, {4, 1.0 - q3}});
    thresholds::NuReport rep = thresholds::nu0(dist, cfg.mu);
    csv += fmt_short(q3) + "," + fmt_short(cfg.mu) + "," + fmt17(rep.nu0) + "," +
           std::to_string(int(rep.local_survival)) + "\n";
    if (!crossing && rep.local_survival) crossing = q3;
  }
  records.push_back(make_record(cfg, "nu0_points", double(cfg.q3_values.size())));
  if (crossing)
    records.push_back(make_record(cfg, "first_q3_with_local_survival", *crossing));
  json extra;
  if (crossing) extra["crossing_q3"] = *crossing;
  for (auto& r : records) r.wall_ms = timer.ms();
  write_outputs(cfg, csv, records, extra, timer.ms());
  return records;
}

std::vector<ResultRecord> run_pc_scan(const ExperimentConfig& cfg) {
  if (cfg.mu_values.empty()) throw std::invalid_argument("config: pc-scan needs mu values");
  Timer timer;
  std::string csv = "mu,p_crit\n";
  for (double mu : cfg.mu_values)
    csv += fmt_short(mu) + "," + fmt17(thresholds::p_crit(mu)) + "\n";
  std::vector<ResultRecord> records;
  records.push_back(make_record(cfg, "p_crit_points", double(cfg.mu_values.size())));
  records.back().wall_ms = timer.ms();
  write_outputs(cfg, csv, records, json::object(), timer.ms());
  return records;
}

std::vector<ResultRecord> run_table43(const ExperimentConfig& cfg) {
  Timer timer;
  std::vector<double> q3s = cfg.q3_values;
  std::vector<double> mus = cfg.mu_values;
  if (q3s.empty())
    for (const auto& e : published_nu_table())
      if (std::find(q3s.begin(), q3s.end(), e.q3) == q3s.end()) q3s.push_back(e.q3);
  if (mus.empty()) mus = {1.6, 1.7, 1.8, 1.9};
  std::sort(q3s.begin(), q3s.end());

  std::string csv = "q3,mu,nu0,flag\n";
  json discrepancies = json::array();
  for (double q3 : q3s) {
    for (double mu : mus) {
      DegreeDist dist = DegreeDist({{3, q3}, {4, 1.0 - q3}});
      thresholds::NuReport rep = thresholds::nu0(dist, mu);
      csv += fmt_short(q3) + "," + fmt_short(mu) + "," + fmt17(rep.nu0) + "," +
             std::to_string(int(rep.local_survival)) + "\n";
      for (const auto& e : published_nu_table()) {
        if (std::abs(e.q3 - q3) < 1e-12 && std::abs(e.mu - mu) < 1e-12 &&
            std::abs(e.published - rep.nu0) > 1e-6) {
          json d;
          d["q3"] = q3;
          d["mu"] = mu;
          d["published"] = e.published;
          d["computed"] = rep.nu0;
          discrepancies.push_back(d);
        }
      }
    }
  }
  std::vector<ResultRecord> records;
  records.push_back(make_record(cfg, "table_cells", double(q3s.size() * mus.size())));
  records.push_back(make_record(cfg, "published_discrepancies",
                                double(discrepancies.size())));
  json extra;
  extra["discrepancies"] = discrepancies;
  for (auto& r : records) r.wall_ms = timer.ms();
  write_outputs(cfg, csv, records, extra, timer.ms());
  return records;
}

}  // namespace

std::uint64_t replicate_seeds(std::uint64_t master, std::uint64_t index) {
  return derive_stream(master, index);
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
  if (!j.contains("schema") || j.at("schema").get<int>() != 1)
    throw std::invalid_argument("config: missing or unsupported 'schema' (expected 1)");
  if (!j.contains("kind")) throw std::invalid_argument("config: 'kind' is required");
  if (!j.contains("seed")) throw std::invalid_argument("config: 'seed' is required");

  ExperimentConfig cfg;
  cfg.kind = j.at("kind").get<std::string>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("out")) cfg.out = j.at("out").get<std::string>();

  if (cfg.kind == "forward" || cfg.kind == "cobra") {
    check_keys(j,
               {"schema", "kind", "seed", "out", "tree", "params", "horizon", "replicas",
                "init", "sample_dt", "window_start"},
               cfg.kind);
    cfg.tree = tree_from_json(j.at("tree"));
    cfg.params = ModelParams(j.at("params").at("p").get<std::vector<double>>());
    cfg.horizon = j.at("horizon").get<double>();
    cfg.replicas = j.at("replicas").get<std::uint32_t>();
    if (j.contains("init")) cfg.init = j.at("init").get<std::string>();
    if (cfg.init != "root" && cfg.init != "all")
      throw std::invalid_argument("config: init must be 'root' or 'all'");
    if (j.contains("sample_dt")) cfg.sample_dt = j.at("sample_dt").get<double>();
    if (j.contains("window_start")) cfg.window_start = j.at("window_start").get<double>();
  } else if (cfg.kind == "duality-check") {
    check_keys(j, {"schema", "kind", "seed", "out", "instances", "depth", "horizon"},
               cfg.kind);
    if (j.contains("instances")) cfg.instances = j.at("instances").get<std::uint32_t>();
    if (j.contains("depth")) cfg.depth = j.at("depth").get<int>();
    if (j.contains("horizon")) cfg.horizon = j.at("horizon").get<double>();
  } else if (cfg.kind == "thresholds") {
    check_keys(j, {"schema", "kind", "seed", "out", "graph", "params"}, cfg.kind);
    cfg.graph = graph_from_json(j.at("graph"));
    cfg.params = ModelParams(j.at("params").at("p").get<std::vector<double>>());
  } else if (cfg.kind == "nu0-scan") {
    check_keys(j, {"schema", "kind", "seed", "out", "mu", "q3"}, cfg.kind);
    cfg.mu = j.at("mu").get<double>();
    cfg.q3_values = grid_from_json(j.at("q3"), "q3");
  } else if (cfg.kind == "pc-scan") {
    check_keys(j, {"schema", "kind", "seed", "out", "mu"}, cfg.kind);
    cfg.mu_values = grid_from_json(j.at("mu"), "mu");
  } else if (cfg.kind == "table-43") {
    check_keys(j, {"schema", "kind", "seed", "out", "q3", "mu"}, cfg.kind);
    if (j.contains("q3")) cfg.q3_values = grid_from_json(j.at("q3"), "q3");
    if (j.contains("mu")) cfg.mu_values = grid_from_json(j.at("mu"), "mu");
  } else {
    throw std::invalid_argument("config: unknown kind '" + cfg.kind + "'");
  }

  if (cfg.replicas < 1) throw std::invalid_argument("config: replicas must be >= 1");
  return cfg;
}

ExperimentConfig ExperimentConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  json j;
  in >> j;
  return from_json(j);
}

json ExperimentConfig::to_json() const {
  json j;
  j["schema"] = schema;
  j["kind"] = kind;
  j["seed"] = seed;
  if (out) j["out"] = *out;
  if (kind == "forward" || kind == "cobra") {
    j["tree"] = tree_to_json(*tree);
    j["params"] = json{{"p", params->weights()}};
    j["horizon"] = horizon;
    j["replicas"] = replicas;
    j["init"] = init;
    j["sample_dt"] = sample_dt;
    if (kind == "cobra") j["window_start"] = window_start;
  } else if (kind == "duality-check") {
    j["instances"] = instances;
    j["depth"] = depth;
    if (horizon > 0.0) j["horizon"] = horizon;
  } else if (kind == "thresholds") {
    j["graph"] = graph_to_json(*graph);
    j["params"] = json{{"p", params->weights()}};
  } else if (kind == "nu0-scan") {
    j["mu"] = mu;
    j["q3"] = q3_values;
  } else if (kind == "pc-scan") {
    j["mu"] = mu_values;
  } else if (kind == "table-43") {
    if (!q3_values.empty()) j["q3"] = q3_values;
    if (!mu_values.empty()) j["mu"] = mu_values;
  }
  return j;
}

std::string ExperimentConfig::digest() const {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(to_json().dump())));
  return buf;
}

json ResultRecord::to_json() const {
  json j;
  j["digest"] = digest;
  j["metric"] = metric;
  j["value"] = value;
  if (estimate) j["estimate"] = estimate_to_json(*estimate);
  if (!flags.empty()) j["flags"] = flags;
  j["wall_ms"] = wall_ms;
  return j;
}

std::vector<ResultRecord> run(const ExperimentConfig& cfg) {
  if (cfg.kind == "forward") return run_forward(cfg);
  if (cfg.kind == "cobra") return run_cobra(cfg);
  if (cfg.kind == "duality-check") return run_duality_check(cfg);
  if (cfg.kind == "thresholds") return run_thresholds(cfg);
  if (cfg.kind == "nu0-scan") return run_nu0_scan(cfg);
  if (cfg.kind == "pc-scan") return run_pc_scan(cfg);
  if (cfg.kind == "table-43") return run_table43(cfg);
  throw std::invalid_argument("run: unknown kind '" + cfg.kind + "'");
}

std::vector<ResultRecord> sweep(const ExperimentConfig& base, const std::string& axis,
                                const std::vector<double>& values) {
  std::vector<ResultRecord> grid;
  for (std::size_t i = 0; i < values.size(); ++i) {
    ExperimentConfig cell = base;
    cell.out.reset();  // cells do not write files; the caller owns persistence
    cell.seed = axis == "seed" ? static_cast<std::uint64_t>(values[i])
                               : replicate_seeds(base.seed, i);
    const double v = values[i];
    if (axis == "q3") {
      cell.q3_values = {v};
    } else if (axis == "mu") {
      if (cell.kind == "pc-scan")
        cell.mu_values = {v};
      else
        cell.mu = v;
    } else if (axis == "horizon") {
      cell.horizon = v;
    } else if (axis == "replicas") {
      cell.replicas = static_cast<std::uint32_t>(v);
    } else if (axis == "depth") {
      cell.depth = static_cast<int>(v);
      if (cell.tree) {
        if (auto* r = std::get_if<TreeSpec::Regular>(&cell.tree->spec))
          r->depth = static_cast<int>(v);
        else
          std::get<TreeSpec::GaltonWatson>(cell.tree->spec).depth = static_cast<int>(v);
      }
    } else if (axis != "seed") {
      throw std::invalid_argument("sweep: unknown axis '" + axis + "'");
    }
    for (ResultRecord& rec : run(cell)) {
      rec.metric = axis + "=" + fmt_short(v) + ":" + rec.metric;
      grid.push_back(std::move(rec));
    }
  }
  return grid;
}

const std::vector<NuTableEntry>& published_nu_table() {
  static const std::vector<NuTableEntry> table = {
      {0.8, 1.6, 2.2},           {0.8, 1.7, 2.014149722},  {0.8, 1.8, 1.597069414},
      {0.8, 1.9, 1.074539921},   {0.81, 1.6, 2.19},        {0.81, 1.7, 1.979137551},
      {0.81, 1.8, 1.549560204},  {0.81, 1.9, 1.030929768}, {0.82, 1.6, 2.179999993},
      {0.82, 1.7, 1.942042353},  {0.82, 1.8, 1.500601354}, {0.82, 1.9, 0.896331678},
      {0.83, 1.6, 2.169035962},  {0.83, 1.7, 1.902724759}, {0.83, 1.8, 1.450116162},
      {0.83, 1.9, 0.941977346},  {0.88, 1.6, 2.079229445}, {0.88, 1.7, 1.666138794},
      {0.88, 1.8, 1.171184237},  {0.88, 1.9, 0.708137684}, {0.89, 1.6, 2.052259329},
      {0.89, 1.7, 1.608953028},  {0.89, 1.8, 1.109102792}, {0.89, 1.9, 0.659079066},
      {0.9, 1.6, 2.021286727},   {0.9, 1.7, 1.547575636},  {0.9, 1.8, 1.044453965},
      {0.9, 1.9, 0.609119574},   {0.91, 1.6, 1.985646496}, {0.91, 1.7, 1.481425138},
      {0.91, 1.8, 0.976943138},  {0.91, 1.9, 0.558174592}, {0.92, 1.6, 1.944464056},
      {0.92, 1.7, 1.409753116},  {0.92, 1.8, 0.906197761}, {0.92, 1.9, 0.506138592},
      {0.93, 1.6, 1.896552634},  {0.93, 1.7, 1.331568175}, {0.93, 1.8, 0.831734216},
      {0.93, 1.9, 0.452876792},  {0.94, 1.6, 1.840236437}, {0.94, 1.7, 1.245508443},
      {0.94, 1.8, 0.752903513},  {0.94, 1.9, 0.398211752}, {0.95, 1.6, 1.773023132},
      {0.95, 1.7, 1.14961228},   {0.95, 1.8, 0.668796138}, {0.95, 1.9, 0.341900422},
      {0.96, 1.6, 1.690934707},  {0.96, 1.7, 1.040865809}, {0.96, 1.8, 0.578059943},
      {0.96, 1.9, 0.283591365},  {0.97, 1.6, 1.586938026}, {0.97, 1.7, 0.914185487},
      {0.97, 1.8, 0.478505588},  {0.97, 1.9, 0.222735055}, {0.98, 1.6, 1.446391322},
      {0.98, 1.7, 0.759622966},  {0.98, 1.8, 0.366073412}, {0.98, 1.9, 0.158358633},
      {0.99, 1.6, 1.227510494},  {0.99, 1.7, 0.551306428}, {0.99, 1.8, 0.23102478},
      {0.99, 1.9, 0.088284998},  {0.995, 1.6, 1.037752234}, {0.996, 1.6, 0.98268267},
      {0.997, 1.6, 0.915774891}, {0.998, 1.6, 0.828879261},
  };
  return table;
}

void write_text_atomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
  }
  fs::rename(tmp, target);
}

}  // namespace zealot::harness

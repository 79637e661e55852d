#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "zealot/harness.hpp"

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::uint32_t> replicas;
  std::optional<double> horizon;
  std::optional<std::string> out;
};

void add_subcommand(CLI::App& app, const std::string& name, const std::string& kind,
                    std::string& config_path, Overrides& ov, std::string& selected) {
  CLI::App* sub = app.add_subcommand(name, "run a '" + kind + "' experiment");
  sub->add_option("--config", config_path, "experiment config (JSON)")->required();
  sub->add_option("--seed", ov.seed, "override the config seed");
  sub->add_option("--replicas", ov.replicas, "override the replica count");
  sub->add_option("--horizon", ov.horizon, "override the time horizon");
  sub->add_option("--out", ov.out, "override the output path prefix");
  sub->callback([&selected, kind]() { selected = kind; });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zealot voter model simulation and threshold toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string selected;
  Overrides ov;
  add_subcommand(app, "simulate-forward", "forward", config_path, ov, selected);
  add_subcommand(app, "simulate-dual", "cobra", config_path, ov, selected);
  add_subcommand(app, "check-duality", "duality-check", config_path, ov, selected);
  add_subcommand(app, "thresholds", "thresholds", config_path, ov, selected);
  add_subcommand(app, "scan-nu0", "nu0-scan", config_path, ov, selected);
  add_subcommand(app, "scan-pc", "pc-scan", config_path, ov, selected);
  add_subcommand(app, "table-43", "table-43", config_path, ov, selected);

  CLI11_PARSE(app, argc, argv);

  try {
    zealot::harness::ExperimentConfig cfg =
        zealot::harness::ExperimentConfig::load_file(config_path);
    if (cfg.kind != selected)
      throw std::invalid_argument("config kind '" + cfg.kind +
                                  "' does not match subcommand '" + selected + "'");
    if (ov.seed) cfg.seed = *ov.seed;
    if (ov.replicas) cfg.replicas = *ov.replicas;
    if (ov.horizon) cfg.horizon = *ov.horizon;
    if (ov.out) cfg.out = *ov.out;

    auto records = zealot::harness::run(cfg);
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : records) out.push_back(r.to_json());
    std::printf("%s\n", out.dump(2).c_str());
    return 0;
  } catch (const std::exception& e) {
    nlohmann::json err;
    err["error"] = e.what();
    std::fprintf(stderr, "%s\n", err.dump().c_str());
    return 1;
  }
}

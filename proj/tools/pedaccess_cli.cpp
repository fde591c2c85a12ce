#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "pedaccess/pipeline/config.hpp"
#include "pedaccess/pipeline/stages.hpp"

namespace {

struct Args {
  std::string config;
  std::vector<std::string> regions;
  std::string out;
  unsigned threads = 0;
  std::uint64_t seed = 1;
  std::string official_edges;
  std::string official_dests;
  std::string review;
  std::vector<double> radii{10, 50};
};

void add_common(CLI::App* cmd, Args& a) {
  cmd->add_option("--config", a.config, "project configuration (YAML)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--region", a.regions, "restrict to these regions (repeatable)");
  cmd->add_option("--out", a.out, "output directory (default: the config's output_dir)");
  cmd->add_option("--threads", a.threads, "worker threads (0 = hardware concurrency)");
  cmd->add_option("--seed", a.seed, "seed for the ground-truth sample");
}

void add_validation(CLI::App* cmd, Args& a) {
  cmd->add_option("--official-edges", a.official_edges, "official street centrelines (GeoJSON, WGS84)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--official-dests", a.official_dests, "official destination points (GeoJSON, WGS84)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--radii", a.radii, "edge overlap buffer radii in meters")->delimiter(',');
  cmd->add_option("--review", a.review, "completed ground-truth review sheet (CSV) to tally")
      ->check(CLI::ExistingFile);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pedestrian accessibility indicators from open data"};
  app.set_version_flag("--version", std::string(PEDACCESS_VERSION));
  app.require_subcommand(1);
  Args a;

  struct Sub {
    const char* name;
    const char* help;
    pedaccess::StageSet stages;
  };
  const Sub subs[] = {
      {"ingest", "build the network, destinations and hex grid per region", {pedaccess::Stage::ingest}},
      {"sample", "sample points and their estimates", {pedaccess::Stage::sample}},
      {"aggregate", "hex and city indicator frames", {pedaccess::Stage::aggregate}},
      {"validate", "comparison with official layers and ground-truth sampling", {pedaccess::Stage::validate}},
      {"run-all", "every stage in order", pedaccess::all_stages()},
  };
  std::vector<std::pair<CLI::App*, pedaccess::StageSet>> cmds;
  for (const Sub& s : subs) {
    CLI::App* cmd = app.add_subcommand(s.name, s.help);
    add_common(cmd, a);
    if (s.stages.count(pedaccess::Stage::validate)) add_validation(cmd, a);
    cmds.emplace_back(cmd, s.stages);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    const pedaccess::ProjectConfig cfg = pedaccess::load_config(a.config);
    pedaccess::RunOptions opt;
    if (!a.out.empty()) opt.out_dir = a.out;
    opt.regions = a.regions;
    opt.threads = a.threads ? a.threads : std::max(1u, std::thread::hardware_concurrency());
    opt.seed = a.seed;
    if (!a.official_edges.empty()) opt.official_edges = a.official_edges;
    if (!a.official_dests.empty()) opt.official_dests = a.official_dests;
    if (!a.review.empty()) opt.review = a.review;
    opt.radii = a.radii;
    for (const auto& [cmd, stages] : cmds) {
      if (!cmd->parsed()) continue;
      const auto manifest = pedaccess::run_pipeline(cfg, stages, opt);
      std::cerr << "wrote " << manifest.outputs.size() << " files to "
                << (opt.out_dir.empty() ? cfg.resolve(cfg.output_dir) : opt.out_dir).string() << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

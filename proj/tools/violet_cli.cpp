// Command-line driver: stats, train, analyze, report, neighbors.
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "violet/error.hpp"
#include "violet/pipeline.hpp"
#include "violet/similarity.hpp"

namespace {

struct Invocation {
  std::string config_file;
  std::string seed;
  std::string out;
  std::map<std::string, std::string> overrides;
  std::string token;
  std::size_t neighbors = 10;
};

void add_common(CLI::App* cmd, Invocation& inv) {
  cmd->add_option("--config", inv.config_file, "configuration file (key=value lines)");
  cmd->add_option("--seed", inv.seed, "random seed for every stochastic step");
  cmd->add_option("--out", inv.out, "output directory (same as output.dir)");
  for (const auto& key : violet::config_keys()) {
    if (key.key == "seed") continue;
    std::string help = key.help;
    help += key.default_value.empty() ? " [default: none]" : " [default: " + key.default_value + "]";
    cmd->add_option_function<std::string>(
           "--" + key.key,
           [&inv, name = key.key](const std::string& v) { inv.overrides[name] = v; }, help)
        ->group("Configuration keys");
  }
}

int neighbors(const violet::PipelineConfig& config, const Invocation& inv) {
  std::filesystem::path path =
      config.model.empty() ? config.output_dir / violet::artifacts::kModel : config.model;
  std::ifstream in(path);
  if (!in) {
    std::cerr << "violet neighbors: cannot open '" << path.string() << "'\n";
    return 1;
  }
  try {
    auto model = violet::load_model(in);
    std::string token = violet::normalize_token(inv.token, config.preprocess);
    for (const auto& n : violet::nearest_neighbors(model, token, inv.neighbors)) {
      std::cout << n.token << '\t' << n.similarity << '\n';
    }
  } catch (const violet::Error& e) {
    std::cerr << "violet neighbors: " << e.what() << '\n';
    return e.exit_code();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"violet: violation keyword analysis with skip-gram word embeddings"};
  app.require_subcommand(1);
  Invocation inv;

  auto* stats = app.add_subcommand("stats", "violation statistics of the input exports");
  auto* train = app.add_subcommand("train", "preprocess comments and train embeddings");
  auto* analyze = app.add_subcommand("analyze", "keyword matrices and relation chains");
  auto* report = app.add_subcommand("report", "analyze and render the text report");
  auto* nn = app.add_subcommand("neighbors", "most similar words in a trained model");
  for (auto* cmd : {stats, train, analyze, report, nn}) add_common(cmd, inv);
  nn->add_option("--token", inv.token, "query word")->required();
  nn->add_option("-n", inv.neighbors, "number of neighbors");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  violet::PipelineConfig config;
  try {
    violet::ConfigValues values;
    if (!inv.config_file.empty()) values = violet::read_config_file(inv.config_file);
    for (const auto& [k, v] : inv.overrides) values[k] = v;
    if (!inv.seed.empty()) values["seed"] = inv.seed;
    if (!inv.out.empty()) values["output.dir"] = inv.out;
    config = violet::PipelineConfig::from_values(values);
  } catch (const violet::Error& e) {
    std::cerr << "violet: " << e.what() << '\n';
    return e.exit_code();
  }

  if (stats->parsed()) return violet::cmd_stats(config, std::cerr);
  if (train->parsed()) return violet::cmd_train(config, std::cerr);
  if (analyze->parsed()) return violet::cmd_analyze(config, std::cerr);
  if (report->parsed()) return violet::cmd_report(config, std::cerr);
  return neighbors(config, inv);
}

// emfrisk command-line front end.
//
//   emfrisk analyze --input data.csv [--k 5] [--restarts 50] [--seed 0]
//                   [--limit 0.2] [--out out] [--format text,csv,svg,json]
//   emfrisk validate --input data.csv

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "emfrisk/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Cluster ELF magnetic-flux grid measurements into dangerousness classes"};
  app.require_subcommand(1);

  emfrisk::RunConfig config;
  std::vector<std::string> inputs;
  std::vector<std::string> formats{"text", "csv", "svg", "json"};
  std::string out_dir = config.out_dir.string();

  auto* analyze = app.add_subcommand("analyze", "Cluster, classify and render dangerousness maps");
  analyze->add_option("--input", inputs, "Measurement CSV file(s)")->required()->expected(1, -1);
  analyze->add_option("--k", config.k, "Clusters per side")->capture_default_str();
  analyze->add_option("--restarts", config.restarts, "Independent K-Medians runs per side")
      ->capture_default_str();
  analyze->add_option("--seed", config.seed, "Base RNG seed")->capture_default_str();
  analyze->add_option("--limit", config.limit, "Reference limit in uT")->capture_default_str();
  analyze->add_option("--out", out_dir, "Output directory")->capture_default_str();
  analyze->add_option("--format", formats, "Map renders: text,csv,svg,json")
      ->delimiter(',')
      ->check(CLI::IsMember({"text", "csv", "svg", "json"}));

  auto* validate = app.add_subcommand("validate", "Parse and grid-check inputs without clustering");
  validate->add_option("--input", inputs, "Measurement CSV file(s)")->required()->expected(1, -1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : emfrisk::kExitInput;
  }

  config.inputs.assign(inputs.begin(), inputs.end());
  if (*validate) return emfrisk::cmd_validate(config.inputs, std::cout, std::cerr);

  config.out_dir = out_dir;
  config.formats.clear();
  for (const auto& f : formats) config.formats.insert(*emfrisk::parse_format(f));
  return emfrisk::cmd_analyze(config, std::cout, std::cerr);
}

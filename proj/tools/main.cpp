#include <CLI11.hpp>
#include <iostream>
#include <string>
#include <vector>

#include "manistats/experiment.hpp"

namespace {

void emit_error(const manistats::Error& e) {
  std::cerr << "{\"error\": {\"category\": \"" << e.category()
            << "\", \"message\": \"" << e.what() << "\"}}" << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fréchet mean, modulation and two-sample test experiments"};
  app.require_subcommand(1);

  struct SubArgs {
    std::string config;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out;
    int threads = -1;
  };

  std::vector<std::pair<std::string, std::shared_ptr<SubArgs>>> experiments;
  for (const char* name : manistats::kExperimentNames) {
    auto args = std::make_shared<SubArgs>();
    CLI::App* sub = app.add_subcommand(name, std::string("run the ") + name +
                                                 " experiment");
    sub->add_option("--config", args->config, "experiment config (JSON)")
        ->required();
    sub->add_option("--seed", args->seed, "override the config seed")
        ->each([args](const std::string&) { args->seed_set = true; });
    sub->add_option("--out", args->out, "override the output directory");
    sub->add_option("--threads", args->threads,
                    "worker threads (0 = hardware)");
    experiments.emplace_back(name, args);
  }

  std::vector<std::string> table_files;
  CLI::App* table = app.add_subcommand(
      "print-table", "render power-study CSV files as a fixed-width table");
  table->add_option("files", table_files, "power CSV files")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (table->parsed()) {
      std::cout << manistats::print_table(table_files);
      return 0;
    }
    for (const auto& [name, args] : experiments) {
      if (!app.get_subcommand(name)->parsed()) continue;
      manistats::RunOverrides overrides;
      if (args->seed_set) overrides.seed = args->seed;
      if (!args->out.empty()) overrides.out_dir = args->out;
      if (args->threads >= 0) overrides.threads = args->threads;
      manistats::RunResult result =
          manistats::run_experiment(name, args->config, overrides, std::cout);
      for (const auto& path : result.outputs) {
        std::cout << "wrote " << path << "\n";
      }
      return 0;
    }
  } catch (const manistats::Error& e) {
    emit_error(e);
    return manistats::exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "{\"error\": {\"category\": \"internal\", \"message\": \""
              << e.what() << "\"}}" << std::endl;
    return 1;
  }
  return 0;
}

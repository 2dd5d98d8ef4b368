#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "petit/http_manager.hpp"
#include "petit/spec_model.hpp"
#include "petit/test_engine.hpp"

namespace {

constexpr const char* kUsage =
    "usage: petit <spec.json> <STRATEGY> [-v <max-resources>] [-r] [--seed N] [--stable-order]\n"
    "\n"
    "  <spec.json>      path to the annotated OpenAPI document (JSON)\n"
    "  <STRATEGY>       operation order strategy: CMO, COM, MCO, MOC, OCM, OMC or RND\n"
    "  -v <max>         verbose mode; print responses, showing at most <max> resources\n"
    "  -r               test the APIs in random order\n"
    "  --seed N         seed for data generation and shuffling\n"
    "  --stable-order   keep document order within each operation category\n";

struct CliOptions {
  std::string spec_path;
  petit::OrderStrategy strategy = petit::OrderStrategy::COM;
  bool verbose = false;
  int max_resources = 0;
  bool random_api_order = false;
  std::optional<std::uint64_t> seed;
  bool stable_order = false;
};

std::optional<CliOptions> parse_args(int argc, char** argv, std::string& error) {
  CliOptions opts;
  std::vector<std::string> positional;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "-v") {
      if (i + 1 >= argc) {
        error = "-v requires the maximum number of resources to print\n";
        return std::nullopt;
      }
      opts.verbose = true;
      try {
        opts.max_resources = std::stoi(argv[++i]);
      } catch (...) {
        opts.max_resources = 0;
      }
      if (opts.max_resources <= 0) {
        error = "-v requires a positive resource count\n";
        return std::nullopt;
      }
    } else if (arg == "-r") {
      opts.random_api_order = true;
    } else if (arg == "--seed") {
      if (i + 1 >= argc) {
        error = "--seed requires a value\n";
        return std::nullopt;
      }
      opts.seed = std::stoull(argv[++i]);
    } else if (arg == "--stable-order") {
      opts.stable_order = true;
    } else {
      positional.push_back(arg);
    }
  }
  if (positional.size() != 2) {
    error = kUsage;
    return std::nullopt;
  }
  opts.spec_path = positional[0];
  auto strategy = petit::parse_strategy(positional[1]);
  if (!strategy) {
    error = petit::kInvalidStrategyMessage;
    return std::nullopt;
  }
  opts.strategy = *strategy;
  return opts;
}

}  // namespace

int main(int argc, char** argv) {
  std::string error;
  auto opts = parse_args(argc, argv, error);
  if (!opts) {
    std::cerr << error;
    return 2;
  }

  petit::ApiSpec spec;
  try {
    spec = petit::load_spec_file(opts->spec_path);
  } catch (const petit::SpecError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  if (opts->verbose) {
    std::cout << ">>> Maximum resources to be printed: " << opts->max_resources << "\n\n";
  }

  petit::EngineOptions engine_opts;
  engine_opts.strategy = opts->strategy;
  engine_opts.randomize_apis = opts->random_api_order;
  engine_opts.seed = opts->seed.value_or(std::random_device{}());
  engine_opts.verbose = opts->verbose;
  engine_opts.max_resources = opts->max_resources;
  engine_opts.stable_order = opts->stable_order;

  petit::HttpClient client;
  petit::TestEngine engine(spec, client, engine_opts, std::cout);
  try {
    return petit::exit_status(engine.run());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

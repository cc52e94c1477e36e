#include "config.hpp"
#include "experiments.hpp"

#include "isolump/error.hpp"

#include "CLI11.hpp"

#include <iostream>

namespace {

const char* describe(const std::string& kind) {
  if (kind == "spectrum") return "generalized spectra of stiffness or mass pencils";
  if (kind == "convergence") return "first-frequency convergence under refinement";
  if (kind == "simulate") return "explicit wave simulation of the manufactured plate problem";
  if (kind == "deflate-ratio") return "iteration ratio of eigenvalue deflation against plain stepping";
  if (kind == "trimmed-sweep") return "spectra of a rotated trimmed square over a sweep of angles";
  return "measured against predicted bandwidths of lumped masses";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral and explicit-dynamics experiments with lumped isogeometric mass matrices"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  int threads = 1;
  for (const auto& kind : isolump::cli::experiment_kinds()) {
    CLI::App* sub = app.add_subcommand(kind, describe(kind));
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--out", out_dir, "output directory (overrides the config \"output\")");
    sub->add_option("--seed", seed, "random seed (overrides the config \"seed\")");
    sub->add_option("--threads", threads, "worker threads for sweeps")->check(CLI::Range(1, 256));
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  const std::string kind = app.get_subcommands().front()->get_name();

  try {
    const auto config = isolump::cli::ConfigNode::load(config_path);
    isolump::cli::RunContext ctx{config, {}, 1, threads};
    ctx.out = out_dir.empty() ? config.get_string("output", "out/" + kind) : out_dir;
    const int cfg_seed = config.get_int("seed", 1, 0, 2147483647);
    ctx.seed = app.get_subcommands().front()->count("--seed") ? seed : static_cast<std::uint64_t>(cfg_seed);
    isolump::cli::run_experiment(kind, ctx);
    std::cout << kind << ": wrote " << ctx.out.string() << '\n';
    return 0;
  } catch (const isolump::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.is_numerical() ? 3 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}

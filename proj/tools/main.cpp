// nlgs: ground states of the nonlocal operator L u = -m u + a * u.
//
//   nlgs <solve|scan|evolve|check|oracle> --config <path> [--out <dir>] [--seed <int>]

#include <CLI11.hpp>

#include <iostream>

#include "app.hpp"
#include "nlgs/version.hpp"

int main(int argc, char** argv) {
  CLI::App cli{"Principal eigenpairs and growth of nonlocal population models"};
  cli.set_version_flag("--version", nlgs::version);
  cli.require_subcommand(1, 1);
  std::string config;
  std::string out;
  long seed = 0;
  for (const auto& name : nlgs::app::commands()) {
    auto* sub = cli.add_subcommand(name, "run the '" + name + "' command");
    sub->add_option("--config", config, "scenario config (JSON)")->required();
    sub->add_option("--out", out, "output directory (overrides output_dir)");
    sub->add_option("--seed", seed, "reserved; echoed into provenance");
  }
  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? 0 : nlgs::app::exit_usage;
  }
  const auto* sub = cli.get_subcommands().front();
  nlgs::app::RunOptions opts;
  if (!out.empty()) opts.out_dir = out;
  if (sub->count("--seed")) opts.seed = seed;
  return nlgs::app::run_file(sub->get_name(), config, opts, std::cerr);
}

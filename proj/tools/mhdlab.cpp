#include <CLI11.hpp>
#include <iostream>

#include "mhdlab/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"mhdlab: mollified MHD solver and verification harness"};
  app.require_subcommand(1, 1);
  mhdlab::RunOptions opts;
  std::string out;
  std::uint64_t seed = 0;
  for (const auto& name : mhdlab::command_names()) {
    auto* sub = app.add_subcommand(name, "run the " + name + " command");
    sub->add_option("--config", opts.config_path, "JSON config file")->required();
    sub->add_option("--out", out, "output directory (overrides the config)");
    sub->add_option("--seed", seed, "seed for random fields (overrides the config)");
    sub->callback([&opts, name] { opts.command = name; });
  }
  CLI11_PARSE(app, argc, argv);
  for (auto* sub : app.get_subcommands()) {
    if (sub->count("--out")) opts.out_dir = out;
    if (sub->count("--seed")) opts.seed = seed;
  }
  return mhdlab::run(opts);
}

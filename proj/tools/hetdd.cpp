#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hetdd/cli/commands.hpp"

using namespace hetdd::cli;

int main(int argc, char** argv) {
  CLI::App app{"Heterogeneous advection-diffusion / transport coupling experiments"};
  app.require_subcommand(1);

  std::string config_path, out_dir, errors_path;
  std::vector<std::string> overrides;
  unsigned jobs = default_jobs();

  auto add_run_flags = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key=value config file");
    sub->add_option("--override", overrides, "section.key=value, applied after the file")->take_all();
    sub->add_option("--out", out_dir, "output directory (overrides output.dir)");
  };

  auto* solve = app.add_subcommand("solve", "run one method at one viscosity");
  add_run_flags(solve);
  auto* sweep = app.add_subcommand("sweep", "run every method over a viscosity list");
  add_run_flags(sweep);
  sweep->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  auto* slopes = app.add_subcommand("slopes", "fit log-log slopes from errors.csv");
  slopes->add_option("errors", errors_path, "errors.csv from sweep")->required();
  slopes->add_option("--out", out_dir, "directory for slopes.csv");
  auto* plot = app.add_subcommand("plot", "draw the two error panels from errors.csv");
  plot->add_option("errors", errors_path, "errors.csv from sweep")->required();
  plot->add_option("--out", out_dir, "output directory")->default_val(".");
  auto* check = app.add_subcommand("check", "run the oracle and identity self-checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : config_failure;
  }

  auto load = [&] {
    KeyValues kv;
    if (!config_path.empty()) kv = read_config_file(config_path);
    apply_overrides(kv, overrides);
    if (!out_dir.empty()) kv["output.dir"] = out_dir;
    return resolve(kv);
  };

  return exit_code_for(
      [&] {
        if (solve->parsed()) {
          cmd_solve(load(), std::cout);
        } else if (sweep->parsed()) {
          cmd_sweep(load(), jobs, std::cout);
        } else if (slopes->parsed()) {
          cmd_slopes(errors_path, out_dir, std::cout);
        } else if (plot->parsed()) {
          cmd_plot(errors_path, out_dir, std::cout);
        } else if (check->parsed()) {
          cmd_check(std::cout);
        }
      },
      std::cerr);
}

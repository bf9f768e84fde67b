#include <CLI11.hpp>
#include <iostream>

#include "vfe/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"vfe - variational field-theory engine"};
  app.require_subcommand(1);

  std::string config_path, section_csv;
  vfe::CheckCliOptions check_opts;
  std::uint64_t seed = 0;
  int points = 0;

  CLI::App* derive = app.add_subcommand("derive", "print the derived geometric objects");
  derive->add_option("config", config_path, "problem config file")->required();

  CLI::App* check = app.add_subcommand("check", "run the invariant check suites");
  check->add_option("config", config_path, "problem config file")->required();
  CLI::Option* seed_opt = check->add_option("--seed", seed, "override the sampling seed");
  CLI::Option* points_opt = check->add_option("--points", points, "override points per check");
  check->add_flag("--selftest-corrupt-sign", check_opts.corrupt_lemma1_sign,
                  "corrupt a sign inside the semibasic check (harness self-test)")
      ->group("");  // hidden

  CLI::App* solve = app.add_subcommand("solve", "solve the Dirichlet problem and write CSVs");
  solve->add_option("config", config_path, "problem config file")->required();

  CLI::App* report = app.add_subcommand("report", "re-check a section CSV against the problem");
  report->add_option("section", section_csv, "section CSV file")->required();
  report->add_option("config", config_path, "problem config file")->required();

  CLI11_PARSE(app, argc, argv);

  if (derive->parsed()) return vfe::cmd_derive(config_path, std::cout, std::cerr);
  if (check->parsed()) {
    if (*seed_opt) check_opts.seed = seed;
    if (*points_opt) check_opts.points = points;
    return vfe::cmd_check(config_path, check_opts, std::cout, std::cerr);
  }
  if (solve->parsed()) return vfe::cmd_solve(config_path, std::cout, std::cerr);
  if (report->parsed()) return vfe::cmd_report(section_csv, config_path, std::cout, std::cerr);
  return 2;
}

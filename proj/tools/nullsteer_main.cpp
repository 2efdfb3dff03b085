#include <iostream>

#include "CLI11.hpp"

#include "nullsteer/runner.hpp"

namespace {

int report(const nullsteer::RunResult& r) {
  if (r.exit_code == nullsteer::exit_ok) {
    for (const auto& f : r.files) std::cout << f.string() << '\n';
    return 0;
  }
  std::cerr << "nullsteer: " << r.message;
  if (r.detection_step) std::cerr << " (step " << *r.detection_step << ")";
  std::cerr << '\n';
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conditional evolution under repeated null measurements"};
  app.set_version_flag("--version", nullsteer::version());
  app.require_subcommand(1);

  nullsteer::RunOptions opts;
  std::string config_path, out_dir;
  double tie_tol = 0.0, grouping_tol = 0.0;

  auto* run = app.add_subcommand("run", "Run the experiment described by a JSON config");
  run->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_flag("--dump-states", opts.dump_states, "Write full state vectors in trajectory.csv");
  auto* tie = run->add_option("--tie-tol", tie_tol, "Modulus tie tolerance for the dominant eigenvalue")
                  ->check(CLI::PositiveNumber);
  auto* group = run->add_option("--grouping-tol", grouping_tol, "Energy degeneracy tolerance")
                    ->check(CLI::PositiveNumber);

  std::string figure;
  std::string fig_out;
  auto* repro = app.add_subcommand("reproduce", "Regenerate the data behind one figure");
  repro->add_option("figure_id", figure, "Figure id")->required()->check(CLI::IsMember(nullsteer::figure_ids()));
  repro->add_option("--out", fig_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : nullsteer::exit_config;
  }

  if (*run) {
    if (*tie) opts.tie_tol = tie_tol;
    if (*group) opts.grouping_tol = grouping_tol;
    return report(nullsteer::run_config_file(config_path, out_dir, opts));
  }
  try {
    return report(nullsteer::reproduce(figure, fig_out, opts));
  } catch (...) {
    return report(nullsteer::result_from_exception(std::current_exception()));
  }
}

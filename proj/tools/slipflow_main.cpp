#include <iostream>

#include <CLI11.hpp>

#include "slipflow/config.hpp"
#include "slipflow/mesh.hpp"
#include "slipflow/runner.hpp"

namespace {

int validate_command(const std::string& path) {
  try {
    const auto config = slipflow::load_config(path);
    const auto shape = slipflow::validate_shape(slipflow::shape_candidate(config), slipflow::admissible_params(config));
    const auto mesh = slipflow::build_mesh(shape, config.n_x, config.n_y);
    slipflow::slip_bound(config).validate();
    std::cout << "ok: task " << slipflow::to_string(config.task) << ", " << mesh.vertices.size() << " vertices, "
              << mesh.triangles.size() << " triangles\n";
    return slipflow::kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "invalid: " << e.what() << '\n';
    return slipflow::kExitError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stokes flow with threshold slip: solves, fixed points, shape optimization"};
  app.require_subcommand(1);

  std::string run_config, out_dir;
  std::uint64_t seed = 0;
  auto* run = app.add_subcommand("run", "execute the task of a config file");
  run->add_option("config", run_config, "config file")->required()->check(CLI::ExistingFile);
  auto* out_opt = run->add_option("--out", out_dir, "output directory (overrides output_dir)");
  auto* seed_opt = run->add_option("--seed", seed, "seed for the random residual checks (overrides seed)");

  std::string validate_config;
  auto* validate = app.add_subcommand("validate", "check a config file and its shape");
  validate->add_option("config", validate_config, "config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : slipflow::kExitError;
  }

  if (*validate) return validate_command(validate_config);

  slipflow::RunOptions options;
  if (*out_opt) options.out_dir = out_dir;
  if (*seed_opt) options.seed = seed;
  options.threads = slipflow::threads_from_environment();
  return slipflow::run_file(run_config, options);
}

#include <CLI11.hpp>

#include <iostream>

#include "lindstedt/cli.hpp"
#include "lindstedt/errors.hpp"

namespace cli = lindstedt::cli;

int main(int argc, char** argv) {
  CLI::App app{"Lindstedt series for maximal and lower-dimensional tori"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int threads = 1;
  int precision_bits = 0;

  const char* verbs[][2] = {
      {"run", "expand, audit, residuals, fits and bounds"},
      {"expand-max", "expand a maximal torus"},
      {"expand-lower", "expand a lower-dimensional torus"},
      {"residual", "expand and tabulate truncation residuals"},
      {"gevrey-fit", "expand and fit Gevrey growth of the norms"},
      {"check-bounds", "solve-bound, degree and inductive-condition checks"},
      {"profile-frequency", "distance-to-resonance profile and (nu, tau)"},
  };
  for (const auto& [name, help] : verbs) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "run configuration (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (overrides config)");
    sub->add_option("--threads", threads, "worker threads")
        ->check(CLI::PositiveNumber);
    sub->add_option("--precision-bits", precision_bits,
                    "working precision; 53 is binary64")
        ->check(CLI::Range(53, 1 << 16));
  }

  CLI11_PARSE(app, argc, argv);

  const auto verb = cli::verb_from_name(app.get_subcommands().front()->get_name());
  cli::RunOptions options;
  options.threads = threads;
  if (!out_dir.empty()) options.out_dir = out_dir;
  if (precision_bits > 0) options.precision_bits = precision_bits;

  cli::RunConfig config;
  try {
    config = cli::parse_config(config_path);
  } catch (const lindstedt::ConfigError& e) {
    std::cerr << "config error:\n";
    for (const auto& v : e.violations()) std::cerr << "  " << v << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::exit_code_for(e);
  }
  return cli::run(*verb, config, options, std::cout, std::cerr);
}

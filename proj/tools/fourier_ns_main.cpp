#include "fourier_ns/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  using namespace fourier_ns;
  CLI::App app{"Truncated Fourier-lattice Navier-Stokes solver and verification harness"};
  app.set_version_flag("--version", std::string(FOURIER_NS_VERSION));
  app.require_subcommand(0, 1);

  bool print_default = false;
  app.add_flag("--print-default-config", print_default, "Print the default configuration and exit");

  CommandOptions opt;
  std::string config, out;
  int threads = 0;
  std::uint64_t seed = 0;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "Configuration file (JSON)")->check(CLI::ExistingFile);
    sub->add_option("--out", out, "Output directory (overrides the config)");
    sub->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "Data seed (overrides the config)");
  };
  CLI::App* solve = app.add_subcommand("solve", "Run the Picard solve and write artifacts");
  CLI::App* verify = app.add_subcommand("verify", "Check a solve's artifacts against the uniform estimates");
  CLI::App* boot = app.add_subcommand("bootstrap", "Run the regularity bootstrap on a solve's artifacts");
  CLI::App* bench = app.add_subcommand("bench", "Time direct against FFT convolution");
  for (CLI::App* sub : {solve, verify, boot, bench}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitBadConfig;
  }

  if (print_default) {
    std::cout << to_json(RunConfig{}).dump(2) << '\n';
    return kExitOk;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return kExitBadConfig;
  }
  if (!config.empty()) opt.config = config;
  if (!out.empty()) opt.out = out;
  if (threads > 0) opt.threads = threads;
  CLI::App* sub = app.get_subcommands().front();
  if (sub->count("--seed")) opt.seed = seed;

  try {
    if (sub == solve) return cmd_solve(opt, std::cout, std::cerr);
    if (sub == verify) return cmd_verify(opt, std::cout, std::cerr);
    if (sub == boot) return cmd_bootstrap(opt, std::cout, std::cerr);
    return cmd_bench(opt, std::cout, std::cerr);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "recollide/runner.hpp"

using namespace recollide;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitConvergence = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dissociative recollision spectra of D2 in strong laser fields"};
  std::string scenario, config, out;
  int threads = 1;
  bool dump = false;
  app.add_option("scenario", scenario, "pump_dump | bichromatic | two_color | field_free | coincidence")
      ->required();
  app.add_option("--config", config, "Config file")->required();
  app.add_option("--out", out, "Output directory (overrides [output] dir)");
  app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--dump-trajectories", dump, "Also write sample saddle-point trajectories");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    const Scenario s = parse_scenario(scenario);
    const RunConfig cfg = load_config(config);
    RunOptions opt;
    opt.threads = threads;
    opt.dump_trajectories = dump;
    const ScenarioResult r = run_scenario(s, cfg, opt);
    const std::string dir = out.empty() ? cfg.out_dir : out;
    write_outputs(r, s, dir);
    std::cout << r.summary << "\n";
    if (!r.converged) {
      std::cerr << "recollide: " << r.convergence_note << "\n";
      return kExitConvergence;
    }
    return kExitOk;
  } catch (const Error& e) {
    std::cerr << "recollide: " << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::Config:
      case ErrorCode::InvalidArgument:
      case ErrorCode::NoBoundStates:
      case ErrorCode::GridTooCoarse:
      case ErrorCode::SliceOutOfRange:
        return kExitConfig;
      case ErrorCode::Convergence:
        return kExitConvergence;
      default:
        return 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "recollide: " << e.what() << "\n";
    return 1;
  }
}

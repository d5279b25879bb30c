// Experiment runner: one config file per run, artifacts in --out.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "saddle/config.hpp"
#include "saddle/error.hpp"
#include "saddle/io.hpp"
#include "saddle/runner.hpp"

namespace {

int fail(const saddle::Error& e, const std::filesystem::path& out) {
  std::cerr << "error [" << saddle::to_string(e.kind()) << ", " << e.module() << "]: " << e.what() << "\n";
  if (!out.empty()) {
    try {
      std::filesystem::create_directories(out);
      saddle::write_text(out / "error.json", saddle::error_record(e));
    } catch (const std::exception&) {
      // stderr already has the message
    }
  }
  return e.kind() == saddle::ErrorKind::ConfigError ? 2 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Jenkins-Serrin minimal graphs, conjugate surfaces and divergence lines"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int workers = 1;
  long seed = 0;
  for (const char* name : {"solve", "flux-report", "sequence", "compare", "export"}) {
    CLI::App* sub = app.add_subcommand(name, std::string("run the config in ") + name + " mode");
    sub->add_option("--config", config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (default: config 'output')");
    sub->add_option("--workers", workers, "concurrent sequence members")->check(CLI::Range(1, 256));
    sub->add_option("--seed", seed, "reserved; the solver is deterministic");
  }
  CLI11_PARSE(app, argc, argv);
  const std::string mode = app.get_subcommands().front()->get_name();

  std::filesystem::path out = out_dir;
  try {
    saddle::ExperimentConfig config = saddle::load_config(config_path);
    if (out.empty()) out = config.output;
    const bool want_sequence = mode == "sequence";
    if (want_sequence != (config.mode == saddle::Mode::Sequence))
      throw saddle::Error(saddle::ErrorKind::ConfigError, "cli",
                          "config mode '" + std::string(saddle::to_string(config.mode)) + "' cannot run as '" + mode + "'");
    for (saddle::Mode m : {saddle::Mode::Solve, saddle::Mode::FluxReport, saddle::Mode::Compare, saddle::Mode::Export})
      if (mode == saddle::to_string(m)) config.mode = m;

    const saddle::RunResult r = saddle::run_experiment(config, {out, workers});
    for (const std::string& s : r.summary) std::cout << s << "\n";
    for (const std::string& f : r.files) std::cout << "wrote " << (r.out / f).string() << "\n";
    std::filesystem::remove(out / "error.json");
    return 0;
  } catch (const saddle::Error& e) {
    return fail(e, out);
  } catch (const std::exception& e) {
    return fail(saddle::Error(saddle::ErrorKind::IoError, "cli", e.what()), out);
  }
}

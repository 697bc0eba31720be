#include <CLI11.hpp>
#include <chemolimit/config.hpp>
#include <chemolimit/error.hpp>
#include <chemolimit/experiment.hpp>
#include <chemolimit/io.hpp>

#include <iostream>
#include <optional>
#include <string>

namespace {

enum ExitCode { kOk = 0, kConfigError = 1, kNumericalFailure = 2, kCheckFailed = 3 };

struct Options {
  std::string config_path;
  std::string out;
  int jobs = 0;
  bool quiet = false;
};

int run(chemolimit::Mode mode, const Options& opts) {
  using namespace chemolimit;
  ExperimentConfig config;
  try {
    config = opts.config_path.empty() ? parse_config("") : load_config(opts.config_path);
    config.mode = mode;
    if (!opts.out.empty()) config.output = opts.out;
    if (opts.jobs > 0) config.jobs = opts.jobs;
    config.validate();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  }

  std::optional<ManifestWriter> writer;
  try {
    writer.emplace(config.output);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
  Logger log;
  if (!opts.quiet) log = [](const std::string& line) { std::cerr << line << "\n"; };

  int status = kOk;
  try {
    status = run_mode(config, *writer, log);
  } catch (const ConfigError& e) {
    writer->set_status(std::string("config error: ") + e.what());
    std::cerr << "config error: " << e.what() << "\n";
    status = kConfigError;
  } catch (const std::exception& e) {
    writer->set_status(std::string("numerical failure: ") + e.what());
    std::cerr << "numerical failure: " << e.what() << "\n";
    status = kNumericalFailure;
  }
  writer->finalize();
  if (!opts.quiet) {
    for (const auto& n : writer->snapshot().notices) std::cerr << "notice: " << n << "\n";
    std::cerr << "artifacts in " << writer->directory() << "\n";
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Diffuse and sharp interface limit experiments for a bistable chemotaxis model"};
  app.require_subcommand(1);
  Options opts;

  struct Entry {
    const char* name;
    const char* help;
    chemolimit::Mode mode;
  };
  const Entry entries[] = {
      {"simulate-diffuse", "Run the diffuse model (per sweep eps) and write snapshots and metrics",
       chemolimit::Mode::diffuse},
      {"simulate-sharp", "Run the sharp interface (level set) problem", chemolimit::Mode::sharp},
      {"compare", "Run diffuse and sharp side by side and fit convergence rates", chemolimit::Mode::compare},
      {"generation-check", "Check the generation bounds and the envelope containment",
       chemolimit::Mode::generation},
      {"profile-tools", "Tabulate the front profile, the flow Y, the roots and the constants",
       chemolimit::Mode::profile_tools},
  };
  for (const auto& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    sub->add_option("--config", opts.config_path, "Configuration file (key = value with [sections])")
        ->check(CLI::ExistingFile);
    sub->add_option("--out", opts.out, "Output directory (overrides run.output)");
    sub->add_option("--jobs", opts.jobs, "Concurrent sweep members (overrides run.jobs)")->check(CLI::PositiveNumber);
    sub->add_flag("--quiet", opts.quiet, "Suppress progress output");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }
  for (const auto& e : entries)
    if (app.got_subcommand(e.name)) return run(e.mode, opts);
  return kConfigError;
}

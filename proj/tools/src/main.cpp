#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "pnm/errors.hpp"
#include "pnm_cli/experiments.hpp"

namespace {

void add_common(CLI::App* sub, pnm::cli::RunOptions& opt, std::uint64_t& seed) {
  sub->add_option("--config,-c", opt.config_path, "Configuration file")->required()->check(CLI::ExistingFile);
  sub->add_option("--override,-o", opt.overrides, "section.key=value, repeatable");
  sub->add_option("--threads,-j", opt.threads, "Worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
  sub->add_option("--seed", seed, "Base seed, replaces optimizer.seed");
  sub->add_option("--out", opt.out_dir, "Output directory, replaces output.path");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace pnm::cli;
  CLI::App app{"Non-Markovianity experiments for a SiV centre coupled to phonons"};
  app.require_subcommand(1);
  RunOptions opt;
  std::uint64_t seed = 0;

  std::vector<std::string> names = experiment_names();
  names.push_back("run");
  for (const auto& n : names) {
    CLI::App* sub = app.add_subcommand(n, n == "run" ? "Run the experiment named in the config"
                                                     : "Run the " + n + " experiment");
    add_common(sub, opt, seed);
    sub->callback([&opt, n] { opt.subcommand = n; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    if (code == 0) return 0;
    std::cerr << error_json("config_error", e.what(), kExitValidation) << "\n";
    return kExitValidation;
  }
  for (const auto* sub : app.get_subcommands()) {
    if (sub->count("--seed") > 0) opt.seed = seed;
  }

  try {
    const RunOutcome out = run(opt);
    std::cout << out.csv_path << "\n" << out.json_path << "\n";
    if (out.exit_code != kExitOk) {
      std::cerr << error_json("validation_failed", "one or more checks failed, see " + out.json_path, out.exit_code)
                << "\n";
    }
    return out.exit_code;
  } catch (const pnm::Error& e) {
    const int code = exit_code_for_kind(e.kind());
    std::cerr << error_json(e.kind(), e.what(), code) << "\n";
    return code;
  } catch (const std::exception& e) {
    std::cerr << error_json("internal_error", e.what(), kExitNumerical) << "\n";
    return kExitNumerical;
  }
}

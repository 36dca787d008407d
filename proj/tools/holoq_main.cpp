#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "holoq/errors.hpp"
#include "holoq/scenario.hpp"

namespace {

int dispatch(const std::string& mode, const std::string& file,
             const std::string& out, std::uint64_t seed, bool quiet) {
  if (mode == "validate") {
    const holoq::Scenario s = holoq::load_scenario(file);
    std::cout << holoq::normalized_dump(s) << '\n';
    return 0;
  }
  const holoq::Scenario s = holoq::load_scenario(file);
  const holoq::RunReport report = holoq::run_scenario(s, seed, out);
  if (!quiet) {
    std::cout << holoq::normalized_dump(s) << '\n';
    std::cout << "-- summary --\n";
    for (const auto& [key, value] : report.summary)
      std::cout << key << " = " << value << '\n';
    std::cout << "wrote " << report.csv_path << " (" << report.rows
              << " rows)\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"holoq — gauge-covariant nonlocal observables"};
  app.require_subcommand(1);

  std::string file;
  std::string out;
  std::uint64_t seed = 0;
  bool quiet = false;

  CLI::App* run = app.add_subcommand("run", "execute a scenario file");
  run->add_option("file", file, "scenario configuration (JSON)")->required();
  run->add_option("--out", out, "override the output CSV path");
  run->add_option("--seed", seed, "base seed for randomized sweeps");
  run->add_flag("--quiet", quiet, "suppress stdout; only write the CSV");

  CLI::App* validate =
      app.add_subcommand("validate", "parse a scenario and print its "
                                     "normalized form without running it");
  validate->add_option("file", file, "scenario configuration (JSON)")
      ->required();

  CLI::App* list =
      app.add_subcommand("list-scenarios", "print the supported scenario kinds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (list->parsed()) {
      for (const char* name :
           {"double_slit", "ab_static", "ab_dynamic", "ab_nonabelian",
            "josephson_two_path", "cosmic_string", "gauge_invariance_suite"})
        std::cout << name << '\n';
      return 0;
    }
    return dispatch(run->parsed() ? "run" : "validate", file, out, seed, quiet);
  } catch (const holoq::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const holoq::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const holoq::NumericError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const holoq::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

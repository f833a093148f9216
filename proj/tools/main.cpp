#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "cli.hpp"

using namespace wellcheck;

int main(int argc, char** argv) {
  CLI::App app{"wellcheck: well groups of piecewise-linear fields on 1-complexes"};
  app.require_subcommand(1);

  cli::RunConfig config;
  std::string family;
  std::string radii;
  std::string format;

  auto add_common = [&](CLI::App* sub, bool needs_input) {
    auto* input = sub->add_option("input", config.input, "instance JSON (or builtin:counterexample)");
    if (needs_input) input->required();
    sub->add_option("-o,--output", config.output, "output file (json) or file prefix (csv)");
    sub->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--family", family, "override the perturbation family")->check(CLI::IsMember({"full", "shift"}));
    sub->add_option("--radii", radii, "\"auto\" or comma-separated radii");
    sub->add_flag("--fail-on-violation", config.fail_on_violation, "exit 1 when SWL violations are found");
    sub->add_flag("--oracle-crosscheck", config.oracle_crosscheck, "compare verdicts with brute-force enumeration");
    sub->add_option("--lattice-resolution", config.lattice_resolution, "lattice step for the oracle")
        ->check(CLI::PositiveNumber);
    sub->add_flag("--all-pairs", config.all_pairs, "check SWL on all grid pairs, not only consecutive ones");
  };

  const std::map<std::string, cli::Command> commands{{"analyze", cli::Command::Analyze},
                                                     {"swl-check", cli::Command::SwlCheck},
                                                     {"counterexample", cli::Command::Counterexample},
                                                     {"diagram", cli::Command::Diagram}};
  for (const auto& [name, cmd] : commands) {
    auto* sub = app.add_subcommand(name);
    add_common(sub, cmd != cli::Command::Counterexample);
    sub->callback([&config, cmd = cmd] { config.command = cmd; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::exit_code::invalid_input;
  }

  if (format.empty()) format = config.command == cli::Command::Diagram ? "csv" : "json";
  config.format = format == "csv" ? cli::Format::Csv : cli::Format::Json;
  if (family == "full") config.family = FamilyKind::FullSupNorm;
  if (family == "shift") config.family = FamilyKind::Shift;
  if (!radii.empty()) {
    try {
      config.radii = cli::parse_radii(radii);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return cli::exit_code::invalid_input;
    }
  }
  return cli::run(config, std::cout, std::cerr);
}

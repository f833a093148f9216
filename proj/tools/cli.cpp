#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "wellcheck/errors.hpp"
#include "wellcheck/report.hpp"

namespace wellcheck::cli {

namespace {

// Step functions read off the two figures of the shift counterexample.
constexpr const char* kExpectedBetti0 = "[0,2):2, [2,∞):1";
constexpr const char* kExpectedRank = "[0,1]:2, (1,2):0, [2,5]:1, (5,∞):0";

Instance load(const RunConfig& config) {
  if (config.input.empty() || config.input == kBuiltinCounterexample) return counterexample_instance();
  return load_instance(config.input);
}

AnalyzeOptions options_from(const RunConfig& config) {
  AnalyzeOptions options;
  options.family = config.family;
  options.radii = config.radii;
  options.all_pairs = config.all_pairs;
  options.oracle_crosscheck = config.oracle_crosscheck;
  options.lattice_resolution = config.lattice_resolution;
  return options;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw InvalidInput("cannot open output file " + path);
  file << text;
  if (!file) throw InvalidInput("failed writing " + path);
}

void emit_json(const RunConfig& config, const nlohmann::json& doc, std::ostream& out) {
  const std::string text = canonical_json(doc);
  if (config.output.empty()) {
    out << text;
  } else {
    write_text(config.output, text);
  }
}

void emit_csv(const RunConfig& config, const Analysis& a, std::ostream& out) {
  const std::string betti = step_function_csv(a.betti0);
  const std::string rank = step_function_csv(a.diagram.rank);
  if (config.output.empty()) {
    out << "# betti0\n" << betti << "\n# rank\n" << rank;
    return;
  }
  write_text(config.output + "_betti0.csv", betti);
  write_text(config.output + "_rank.csv", rank);
}

void check_reverification(const nlohmann::json& doc) {
  const auto failures = reverify_report(doc);
  if (failures.empty()) return;
  std::string all;
  for (const auto& f : failures) all += "\n  " + f;
  throw VerificationFailure("report failed re-verification:" + all);
}

void list_violations(const SWLReport& swl, std::ostream& err) {
  char buf[160];
  for (const auto& v : swl.violations) {
    std::snprintf(buf, sizeof buf, "SWL violation: r=%.12g s=%.12g component=%d\n", v.r, v.s, v.component);
    err << buf;
  }
}

int run_counterexample(const RunConfig& config, std::ostream& out, std::ostream& err) {
  AnalyzeOptions options = options_from(config);
  options.family.reset();
  options.radii.reset();
  const Analysis a = analyze(counterexample_instance(), options);
  const std::string betti = a.betti0.describe();
  const std::string rank = a.diagram.rank.describe();
  out << "betti0: " << betti << "\n";
  out << "rank U(r): " << rank << "\n";

  bool found_pair = false;
  for (const auto& v : a.swl.violations) found_pair = found_pair || (v.r == 1.5 && v.s == 2.0);
  list_violations(a.swl, out);

  if (!config.output.empty()) {
    const auto doc = analysis_json(a);
    if (config.oracle_crosscheck) check_reverification(doc);
    write_text(config.output, canonical_json(doc));
  }

  bool ok = true;
  if (betti != kExpectedBetti0) {
    err << "mismatch: expected betti0 " << kExpectedBetti0 << "\n";
    ok = false;
  }
  if (rank != kExpectedRank) {
    err << "mismatch: expected rank " << kExpectedRank << "\n";
    ok = false;
  }
  if (!found_pair) {
    err << "mismatch: expected an SWL violation at (r, s) = (1.5, 2)\n";
    ok = false;
  }
  out << (ok ? "ground truth: match\n" : "ground truth: MISMATCH\n");
  return ok ? exit_code::ok : exit_code::violation;
}

int dispatch(const RunConfig& config, std::ostream& out, std::ostream& err) {
  if (!(config.lattice_resolution > 0.0)) throw InvalidInput("lattice resolution must be positive");
  if (config.command == Command::Counterexample) return run_counterexample(config, out, err);

  const Analysis a = analyze(load(config), options_from(config));
  switch (config.command) {
    case Command::Analyze: {
      if (config.format == Format::Csv) {
        emit_csv(config, a, out);
        return exit_code::ok;
      }
      const auto doc = analysis_json(a);
      if (config.oracle_crosscheck) check_reverification(doc);
      emit_json(config, doc, out);
      return exit_code::ok;
    }
    case Command::Diagram: {
      if (config.format == Format::Json) {
        emit_json(config,
                  {{"betti0", step_function_json(a.betti0, "value")},
                   {"well_diagram",
                    well_diagram_json(a.diagram, a.input.family.kind() == FamilyKind::SampledParametric)}},
                  out);
      } else {
        emit_csv(config, a, out);
      }
      return exit_code::ok;
    }
    case Command::SwlCheck: {
      emit_json(config,
                {{"swl", swl_json(a.swl, a.all_pairs)},
                 {"well_diagram",
                  well_diagram_json(a.diagram, a.input.family.kind() == FamilyKind::SampledParametric)}},
                out);
      list_violations(a.swl, err);
      return !a.swl.violations.empty() && config.fail_on_violation ? exit_code::violation : exit_code::ok;
    }
    case Command::Counterexample:
      break;
  }
  return exit_code::ok;
}

}  // namespace

RadiiSpec parse_radii(const std::string& text) {
  RadiiSpec spec;
  if (text == "auto") return spec;
  spec.mode = RadiiSpec::Mode::Explicit;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    double r = 0.0;
    try {
      r = std::stod(item, &used);
    } catch (const std::exception&) {
      throw InvalidInput("--radii: '" + item + "' is not a number");
    }
    if (used != item.size() || !std::isfinite(r) || r < 0.0)
      throw InvalidInput("--radii: '" + item + "' is not a nonnegative finite number");
    spec.values.push_back(r);
  }
  if (spec.values.empty()) throw InvalidInput("--radii: no radii given");
  return spec;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(config, out, err);
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::invalid_input;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::invalid_input;
  } catch (const VerificationFailure& e) {
    err << "internal verification failure: " << e.what() << "\n";
    return exit_code::internal;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return exit_code::internal;
  }
}

}  // namespace wellcheck::cli

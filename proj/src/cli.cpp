#include "kelly/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "kelly/commands.hpp"
#include "kelly/population_io.hpp"

namespace kelly::cli {
namespace {

struct GlobalFlags {
  bool json = false;
  bool csv = false;
  double tol = kDefaultClearingTolerance;
  std::optional<std::uint64_t> seed;
  int threads = 0;
};

void emit(const cmd::Record& record, const GlobalFlags& flags, std::ostream& out) {
  if (flags.csv) {
    out << cmd::to_csv({record});
  } else {
    out << cmd::to_json_text(record);
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DomainError("cannot open '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kelly fractions, prediction-market clearing and double-or-nothing growth analysis",
               "kellymkt"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags flags;
  auto* json_flag = app.add_flag("--json", flags.json, "Emit JSON records (default)");
  auto* csv_flag = app.add_flag("--csv", flags.csv, "Emit CSV (header plus rows)");
  json_flag->excludes(csv_flag);
  app.add_option("--tol", flags.tol, "Clearing residual tolerance in dollars")->check(CLI::PositiveNumber);
  app.add_option("--seed", flags.seed, "Seed for randomized commands (required by simulate)");
  app.add_option("--threads", flags.threads, "Worker threads for simulation (0 = OpenMP default)")
      ->check(CLI::NonNegativeNumber);

  cmd::Params params;
  auto number = [&params](CLI::App* sub, const std::string& name, bool required, const std::string& help) {
    auto* opt = sub->add_option_function<double>(
        "--" + name, [&params, name](double v) { params.numbers[name] = v; }, help);
    if (required) opt->required();
    return opt;
  };

  auto* fraction = app.add_subcommand("fraction", "Kelly-optimal fraction for belief q at price p");
  number(fraction, "q", true, "Subjective belief");
  number(fraction, "p", true, "Market price");
  number(fraction, "alpha", false, "Payout exponent (default 1)");

  auto* growth = app.add_subcommand("growth", "Even-odds growth rate p log(1+f) + (1-p) log(1-f)");
  number(growth, "p", true, "Win probability");
  number(growth, "f", true, "Bet fraction");

  std::string population_file;
  auto* clear = app.add_subcommand("clear", "Clearing price and mean-belief gap of a population");
  clear->add_option("population_file", population_file, "CSV (capital,belief) or JSON array")->required();

  auto* bounds = app.add_subcommand("bounds", "Exact binomial CDF and Chernoff-type bounds");
  number(bounds, "N", true, "Steps");
  number(bounds, "p", true, "Up probability");
  number(bounds, "k", true, "Up-step count");

  auto* kq = app.add_subcommand("kq", "Up-steps needed for terminal log-wealth Q");
  number(kq, "f", true, "Bet fraction in (0, 1)");
  number(kq, "N", true, "Steps");
  number(kq, "Q", true, "Terminal log-wealth threshold");
  number(kq, "p", false, "Up probability; adds prob_growth_below");

  std::string mode;
  auto* sensitivity = app.add_subcommand("sensitivity", "Misestimated bias or fraction");
  sensitivity->add_option("--mode", mode, "bias or fraction")
      ->required()
      ->check(CLI::IsMember({"bias", "fraction"}));
  number(sensitivity, "N", false, "Steps (bias mode)");
  number(sensitivity, "k", false, "Up-step count (bias mode)");
  number(sensitivity, "p", true, "Up probability");
  number(sensitivity, "eps", true, "Perturbation");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo double-or-nothing game");
  number(simulate, "N", true, "Steps");
  number(simulate, "p", true, "Up probability");
  number(simulate, "f", true, "Bet fraction in [0, 1)");
  number(simulate, "paths", true, "Number of simulated paths");
  number(simulate, "Q", false, "Terminal log-wealth threshold");

  std::string sweep_file;
  auto* sweep = app.add_subcommand("sweep", "Batch sweep from a JSON spec; CSV on stdout");
  sweep->add_option("sweep_file", sweep_file, "JSON sweep spec")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (clear->parsed()) {
      emit(cmd::clear_record(io::load_population(population_file), flags.tol), flags, out);
      return kExitOk;
    }
    if (sweep->parsed()) {
      cmd::SweepSpec spec = cmd::parse_sweep_spec(read_file(sweep_file));
      if (!spec.fixed.seed) spec.fixed.seed = flags.seed;
      const auto rows = cmd::run_sweep(spec, flags.threads);
      out << (flags.json ? cmd::to_json_text(rows) : cmd::to_csv(rows));
      return kExitOk;
    }

    params.seed = flags.seed;
    std::string command;
    for (auto* sub : {fraction, growth, bounds, kq, sensitivity, simulate}) {
      if (sub->parsed()) command = sub->get_name();
    }
    if (command == "sensitivity") {
      params.strings["mode"] = mode;
    }
    emit(cmd::evaluate(command, params, flags.threads), flags, out);
    return kExitOk;
  } catch (const NoInteriorClearing& e) {
    err << "kellymkt: no clearing price: " << e.what() << '\n';
    return kExitNoSolution;
  } catch (const std::exception& e) {
    err << "kellymkt: " << e.what() << '\n';
    return kExitInputError;
  }
}

}  // namespace kelly::cli

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kelly/market_clearing.hpp"

namespace kelly::cmd {

/// One output record. Key order is insertion order and is part of the
/// output contract (CSV column order follows it).
using Record = nlohmann::ordered_json;

/// Named inputs of a command: numeric parameters plus string-valued ones
/// such as the sensitivity mode.
struct Params {
  std::map<std::string, double> numbers;
  std::map<std::string, std::string> strings;
  std::optional<std::uint64_t> seed;

  double number(const std::string& name) const;
  std::optional<double> maybe_number(const std::string& name) const;
  int integer(const std::string& name) const;
  std::string text(const std::string& name) const;
};

/// Computed values are rounded to this many significant digits in JSON.
inline constexpr int kJsonDigits = 15;
/// Significant digits in CSV cells.
inline constexpr int kCsvDigits = 9;

/// Rounds x to `digits` significant decimal digits.
double round_significant(double x, int digits);

Record fraction_record(double q, double p, double alpha);
Record growth_record(double p, double f);
Record clear_record(const MarketPopulation& population, double tol);
Record bounds_record(int n, double p, int k);
Record kq_record(double f, int n, double threshold, std::optional<double> p);
Record sensitivity_bias_record(int n, int k, double p, double eps);
Record sensitivity_fraction_record(double p, double eps);
Record simulate_record(int n, double p, double f, std::int64_t paths, std::uint64_t seed,
                       std::optional<double> threshold, int workers);

/// Dispatches `command` (fraction, growth, bounds, kq, sensitivity, simulate)
/// with named parameters. Used by batch sweeps.
Record evaluate(const std::string& command, const Params& params, int workers);

struct SweepSpec {
  std::string command;
  std::string variable;  // one of q, p, f, alpha, eps, Q, N
  double start;
  double stop;
  double step;
  Params fixed;
};

SweepSpec parse_sweep_spec(const std::string& json_text);

/// Grid values start, start + step, ..., up to stop (inclusive within a
/// relative 1e-9 of a step).
std::vector<double> sweep_grid(const SweepSpec& spec);

/// Evaluates every grid point; throws on the first precondition violation
/// so that no partial table is emitted.
std::vector<Record> run_sweep(const SweepSpec& spec, int workers);

std::string to_json_text(const Record& record);
std::string to_json_text(const std::vector<Record>& records);

/// Header line plus one line per record. Array fields are flattened to
/// name_1, name_2, ...; the header comes from the first record.
std::string to_csv(const std::vector<Record>& records);

}  // namespace kelly::cmd

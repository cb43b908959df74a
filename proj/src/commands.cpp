#include "kelly/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "kelly/growth_analysis.hpp"
#include "kelly/kelly_core.hpp"
#include "kelly/simulation.hpp"

namespace kelly::cmd {
namespace {

double out(double x) { return round_significant(x, kJsonDigits); }

std::string format_number(double x, int digits) {
  if (!std::isfinite(x)) {
    return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

std::string csv_cell(const nlohmann::ordered_json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number_float()) return format_number(v.get<double>(), kCsvDigits);
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) {
      if (c == '"') quoted += '"';
      quoted += c;
    }
    return quoted + '"';
  }
  return v.dump();
}

// Flattens arrays into name_1, name_2, ... preserving key order.
std::vector<std::pair<std::string, nlohmann::ordered_json>> flatten(const Record& r) {
  std::vector<std::pair<std::string, nlohmann::ordered_json>> cells;
  for (auto it = r.begin(); it != r.end(); ++it) {
    if (it.value().is_array()) {
      std::size_t i = 0;
      for (const auto& v : it.value()) {
        cells.emplace_back(it.key() + "_" + std::to_string(++i), v);
      }
    } else {
      cells.emplace_back(it.key(), it.value());
    }
  }
  return cells;
}

int checked_int(double value, const std::string& name) {
  if (!std::isfinite(value) || value != std::floor(value) || std::abs(value) > 1e9) {
    throw DomainError("parameter '" + name + "' must be an integer");
  }
  return static_cast<int>(value);
}

}  // namespace

double Params::number(const std::string& name) const {
  const auto it = numbers.find(name);
  if (it == numbers.end()) {
    throw DomainError("missing parameter '" + name + "'");
  }
  return it->second;
}

std::optional<double> Params::maybe_number(const std::string& name) const {
  const auto it = numbers.find(name);
  if (it == numbers.end()) return std::nullopt;
  return it->second;
}

int Params::integer(const std::string& name) const {
  return checked_int(number(name), name);
}

std::string Params::text(const std::string& name) const {
  const auto it = strings.find(name);
  if (it == strings.end()) {
    throw DomainError("missing parameter '" + name + "'");
  }
  return it->second;
}

double round_significant(double x, int digits) {
  if (!std::isfinite(x) || x == 0.0) return x;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*e", digits - 1, x);
  return std::strtod(buf, nullptr);
}

Record fraction_record(double q, double p, double alpha) {
  const Probability qq(q);
  const Probability pp(p);
  const PayoutSpec spec(alpha);
  Record r;
  r["q"] = q;
  r["p"] = p;
  r["alpha"] = alpha;
  if (alpha == 1.0) {
    const BetFraction f = optimal_fraction(qq, pp);
    r["fraction"] = out(f.value());
    r["utility_at_fraction"] = out(log_utility(qq, pp, f));
  } else {
    const BetFraction f = optimal_fraction_alpha(qq, pp, spec);
    r["fraction"] = out(f.value());
    r["utility_at_fraction"] = out(log_utility_alpha(qq, pp, f, spec));
  }
  return r;
}

Record growth_record(double p, double f) {
  Record r;
  r["p"] = p;
  r["f"] = f;
  r["growth_rate"] = out(even_odds_growth_rate(Probability(p), BetFraction(f)));
  return r;
}

Record clear_record(const MarketPopulation& population, double tol) {
  const ClearingResult result = clearing_price(population, tol);
  Record r;
  r["price"] = out(result.price.value());
  r["mean_belief"] = out(result.mean_belief.value());
  r["gap"] = out(result.gap);
  r["residual"] = out(result.residual);
  nlohmann::ordered_json exposures = nlohmann::ordered_json::array();
  for (double e : result.exposures) {
    exposures.push_back(out(e));
  }
  r["exposures"] = std::move(exposures);
  return r;
}

Record bounds_record(int n, double p, int k) {
  const WalkSpec walk(n, Probability(p));
  require_interior(walk.bias(), "p");
  const double upper = chernoff_upper(walk, k);
  const double lower = chernoff_lower(walk, k);
  Record r;
  r["N"] = n;
  r["p"] = p;
  r["k"] = k;
  r["exact_cdf"] = out(binomial_cdf(walk, k));
  r["upper"] = out(upper);
  r["lower"] = out(lower);
  r["kl"] = out(kl_divergence(Probability(static_cast<double>(k) / n), walk.bias()));
  r["rate_per_step"] = out(rate_per_step(walk, k));
  return r;
}

Record kq_record(double f, int n, double threshold, std::optional<double> p) {
  const BetFraction frac(f);
  const WalkSpec walk(n, Probability(p.value_or(0.5)));
  const GrowthThreshold thr(threshold);
  Record r;
  r["f"] = f;
  r["N"] = n;
  r["Q"] = threshold;
  r["k_Q"] = out(threshold_steps(frac, walk, thr));
  if (p) {
    r["p"] = *p;
    r["prob_growth_below"] = out(prob_growth_below(frac, walk, thr).value());
  }
  return r;
}

Record sensitivity_bias_record(int n, int k, double p, double eps) {
  const WalkSpec walk(n, Probability(p));
  const BiasSensitivity s = sensitivity_bias(k, walk, eps);
  Record r;
  r["mode"] = "bias";
  r["N"] = n;
  r["k"] = k;
  r["p"] = p;
  r["eps"] = eps;
  r["exact"] = out(s.exact);
  r["first_order"] = out(s.first_order);
  return r;
}

Record sensitivity_fraction_record(double p, double eps) {
  const FractionSensitivity s = sensitivity_fraction(Probability(p), eps);
  Record r;
  r["mode"] = "fraction";
  r["p"] = p;
  r["eps"] = eps;
  r["exact"] = out(s.exact);
  r["quadratic"] = out(s.quadratic);
  r["coefficient"] = out(s.coefficient);
  r["quoted_coefficient"] = out(s.quoted_coefficient);
  r["quoted_quadratic"] = out(s.quoted_quadratic);
  return r;
}

Record simulate_record(int n, double p, double f, std::int64_t paths, std::uint64_t seed,
                       std::optional<double> threshold, int workers) {
  const WalkSpec walk(n, Probability(p));
  const BetFraction frac(f);
  std::optional<GrowthThreshold> thr;
  if (threshold) thr.emplace(*threshold);
  const sim::SimConfig config{walk, frac, paths, seed, thr};
  const sim::SimResult result = sim::run(config, workers);

  Record r;
  r["N"] = n;
  r["p"] = p;
  r["f"] = f;
  r["paths"] = paths;
  r["seed"] = seed;
  if (threshold) r["Q"] = *threshold;
  r["mean_log_growth_per_step"] = out(result.mean_log_growth_per_step);
  r["std_error"] = out(result.std_error);
  r["analytic_growth_rate"] = out(even_odds_growth_rate(walk.bias(), frac));
  if (threshold) {
    const double empirical = *result.threshold_hit_fraction;
    r["threshold_hit_fraction"] = out(empirical);
    if (f > 0.0) {
      const sim::ThresholdCheck check = sim::threshold_check(config, result);
      r["exact_prob_below"] = out(check.exact);
      r["z_score"] = out(check.z_score);
    }
  }
  return r;
}

Record evaluate(const std::string& command, const Params& params, int workers) {
  if (command == "fraction") {
    return fraction_record(params.number("q"), params.number("p"), params.maybe_number("alpha").value_or(1.0));
  }
  if (command == "growth") {
    return growth_record(params.number("p"), params.number("f"));
  }
  if (command == "bounds") {
    return bounds_record(params.integer("N"), params.number("p"), params.integer("k"));
  }
  if (command == "kq") {
    return kq_record(params.number("f"), params.integer("N"), params.number("Q"), params.maybe_number("p"));
  }
  if (command == "sensitivity") {
    const std::string mode = params.text("mode");
    if (mode == "bias") {
      return sensitivity_bias_record(params.integer("N"), params.integer("k"), params.number("p"),
                                     params.number("eps"));
    }
    if (mode == "fraction") {
      return sensitivity_fraction_record(params.number("p"), params.number("eps"));
    }
    throw DomainError("sensitivity mode must be 'bias' or 'fraction'");
  }
  if (command == "simulate") {
    if (!params.seed) {
      throw DomainError("simulate requires an explicit seed");
    }
    const double paths = params.number("paths");
    if (!(paths >= 1.0) || paths != std::floor(paths) || paths > 9e15) {
      throw DomainError("paths must be a positive integer");
    }
    return simulate_record(params.integer("N"), params.number("p"), params.number("f"),
                           static_cast<std::int64_t>(paths), *params.seed, params.maybe_number("Q"), workers);
  }
  throw DomainError("unknown command '" + command + "'");
}

SweepSpec parse_sweep_spec(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DomainError(std::string("invalid sweep JSON: ") + e.what());
  }
  if (!doc.is_object()) {
    throw DomainError("sweep file must be a JSON object");
  }
  auto require = [&](const char* key) -> const nlohmann::json& {
    if (!doc.contains(key)) throw DomainError(std::string("sweep file missing '") + key + "'");
    return doc[key];
  };
  SweepSpec spec;
  const auto& command = require("command");
  const auto& variable = require("variable");
  if (!command.is_string() || !variable.is_string()) {
    throw DomainError("sweep 'command' and 'variable' must be strings");
  }
  spec.command = command.get<std::string>();
  spec.variable = variable.get<std::string>();
  static const std::vector<std::string> variables{"q", "p", "f", "alpha", "eps", "Q", "N"};
  if (std::find(variables.begin(), variables.end(), spec.variable) == variables.end()) {
    throw DomainError("sweep variable must be one of q, p, f, alpha, eps, Q, N");
  }

  const auto& range = require("range");
  auto number_at = [](const nlohmann::json& v, const char* what) {
    if (!v.is_number()) throw DomainError(std::string("sweep range '") + what + "' must be a number");
    return v.get<double>();
  };
  if (range.is_array() && range.size() == 3) {
    spec.start = number_at(range[0], "start");
    spec.stop = number_at(range[1], "stop");
    spec.step = number_at(range[2], "step");
  } else if (range.is_object() && range.contains("start") && range.contains("stop") && range.contains("step")) {
    spec.start = number_at(range["start"], "start");
    spec.stop = number_at(range["stop"], "stop");
    spec.step = number_at(range["step"], "step");
  } else {
    throw DomainError("sweep 'range' must be [start, stop, step] or {start, stop, step}");
  }
  if (!(spec.step > 0.0) || !(spec.start <= spec.stop) || !std::isfinite(spec.stop)) {
    throw DomainError("sweep range needs step > 0 and start <= stop");
  }

  if (doc.contains("fixed")) {
    const auto& fixed = doc["fixed"];
    if (!fixed.is_object()) throw DomainError("sweep 'fixed' must be an object");
    for (const auto& [key, value] : fixed.items()) {
      if (key == spec.variable) {
        throw DomainError("parameter '" + key + "' is both fixed and swept");
      }
      if (key == "seed") {
        if (!value.is_number_unsigned()) throw DomainError("seed must be a non-negative integer");
        spec.fixed.seed = value.get<std::uint64_t>();
      } else if (value.is_number()) {
        spec.fixed.numbers[key] = value.get<double>();
      } else if (value.is_string()) {
        spec.fixed.strings[key] = value.get<std::string>();
      } else {
        throw DomainError("fixed parameter '" + key + "' must be a number or string");
      }
    }
  }
  return spec;
}

std::vector<double> sweep_grid(const SweepSpec& spec) {
  const double span = (spec.stop - spec.start) / spec.step;
  if (span > 1e6) {
    throw DomainError("sweep grid exceeds one million points");
  }
  const auto count = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
  std::vector<double> grid;
  grid.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    grid.push_back(round_significant(spec.start + static_cast<double>(i) * spec.step, kJsonDigits));
  }
  return grid;
}

std::vector<Record> run_sweep(const SweepSpec& spec, int workers) {
  std::vector<Record> rows;
  for (double value : sweep_grid(spec)) {
    Params params = spec.fixed;
    if (spec.variable == "N") {
      checked_int(value, "N");
    }
    params.numbers[spec.variable] = value;
    rows.push_back(evaluate(spec.command, params, workers));
  }
  return rows;
}

std::string to_json_text(const Record& record) {
  return record.dump(2) + "\n";
}

std::string to_json_text(const std::vector<Record>& records) {
  Record array = Record::array();
  for (const Record& r : records) array.push_back(r);
  return array.dump(2) + "\n";
}

std::string to_csv(const std::vector<Record>& records) {
  std::ostringstream os;
  if (records.empty()) return {};
  const auto header = flatten(records.front());
  for (std::size_t i = 0; i < header.size(); ++i) {
    os << (i ? "," : "") << header[i].first;
  }
  os << '\n';
  for (const Record& r : records) {
    const auto cells = flatten(r);
    if (cells.size() != header.size()) {
      throw DomainError("CSV rows must share the same columns");
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
      os << (i ? "," : "") << csv_cell(cells[i].second);
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace kelly::cmd

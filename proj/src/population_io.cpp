#include "kelly/population_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace kelly::io {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_number(std::string_view field, std::size_t record) {
  field = trim(field);
  double value = 0.0;
  const char* begin = field.data();
  const char* end = field.data() + field.size();
  if (!field.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (field.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw FormatError("record " + std::to_string(record) + ": not a decimal number: '" +
                      std::string(field) + "'");
  }
  return value;
}

Investor make_investor(double capital, double belief, std::size_t record) {
  try {
    return Investor(capital, Probability(belief));
  } catch (const DomainError& e) {
    throw FormatError("record " + std::to_string(record) + ": " + e.what());
  }
}

}  // namespace

MarketPopulation parse_population_csv(std::string_view text) {
  std::vector<Investor> investors;
  bool header_seen = false;
  std::size_t record = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string_view line =
        trim(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    if (line.empty()) continue;
    if (!header_seen) {
      std::string header(line);
      header.erase(std::remove(header.begin(), header.end(), ' '), header.end());
      if (header.rfind("\xEF\xBB\xBF", 0) == 0) header.erase(0, 3);
      if (header != "capital,belief") {
        throw FormatError("CSV header must be 'capital,belief', got '" + std::string(line) + "'");
      }
      header_seen = true;
      continue;
    }
    ++record;
    const auto comma = line.find(',');
    if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos) {
      throw FormatError("record " + std::to_string(record) + ": expected exactly two fields");
    }
    investors.push_back(make_investor(parse_number(line.substr(0, comma), record),
                                      parse_number(line.substr(comma + 1), record), record));
  }
  if (!header_seen) {
    throw FormatError("empty population file");
  }
  if (investors.empty()) {
    throw FormatError("population file has no investors");
  }
  return MarketPopulation(std::move(investors));
}

MarketPopulation parse_population_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_array()) {
    throw FormatError("population JSON must be an array of {capital, belief} objects");
  }
  std::vector<Investor> investors;
  std::size_t record = 0;
  for (const auto& item : doc) {
    ++record;
    if (!item.is_object() || !item.contains("capital") || !item.contains("belief") ||
        !item["capital"].is_number() || !item["belief"].is_number()) {
      throw FormatError("record " + std::to_string(record) +
                        ": expected {\"capital\": number, \"belief\": number}");
    }
    investors.push_back(make_investor(item["capital"].get<double>(), item["belief"].get<double>(), record));
  }
  if (investors.empty()) {
    throw FormatError("population file has no investors");
  }
  return MarketPopulation(std::move(investors));
}

MarketPopulation parse_population(std::string_view text) {
  if (text.starts_with("\xEF\xBB\xBF")) {
    text.remove_prefix(3);
  }
  const std::string_view body = trim(text);
  if (!body.empty() && body.front() == '[') {
    return parse_population_json(body);
  }
  return parse_population_csv(text);
}

MarketPopulation load_population(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw FormatError("cannot open population file '" + path.string() + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_population(buffer.str());
}

}  // namespace kelly::io

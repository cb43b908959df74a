#pragma once

#include <filesystem>
#include <string_view>

#include "kelly/market_clearing.hpp"

namespace kelly::io {

/// Parse failure in a population file. Carries the 1-based record number
/// when one applies.
class FormatError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// CSV with header `capital,belief`, one investor per line. Blank lines are
/// ignored; numbers use '.' as the decimal separator.
MarketPopulation parse_population_csv(std::string_view text);

/// JSON array of {"capital": number, "belief": number}.
MarketPopulation parse_population_json(std::string_view text);

/// Dispatches on content: a document whose first non-blank character is '['
/// is JSON, anything else CSV.
MarketPopulation parse_population(std::string_view text);

MarketPopulation load_population(const std::filesystem::path& path);

}  // namespace kelly::io

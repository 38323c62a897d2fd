#pragma once

#include <cstddef>
#include <istream>
#include <string>
#include <vector>

namespace topictrend {

struct CsvRow {
  std::size_t line = 0;  // line the row starts on, 1-based
  std::vector<std::string> cells;
};

// Splits RFC-4180 CSV into rows. Quoted cells may contain separators, doubled
// quotes and newlines. Blank lines are skipped.
std::vector<CsvRow> read_csv(std::istream& in);

// Quotes a cell when it contains a separator, quote or line break.
std::string csv_escape(const std::string& cell);

}  // namespace topictrend

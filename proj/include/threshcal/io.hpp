#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "threshcal/types.hpp"

namespace threshcal::io {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class InputSchema { kLabeled, kRaw };  // x,y[,w] vs x,z

struct InputRecord {
  Real x = 0;
  Real y = 0;
  Real w = 1;
  Real z = 0;
};

struct InputData {
  std::optional<InputSchema> schema;  // empty when the input held no records
  std::vector<InputRecord> records;
};

/// Reads CSV (header `x,y[,w]` or `x,z`) or JSONL (objects with the same
/// fields); the first non-blank character picks the format. A blank input
/// yields no schema and no records. Errors carry 1-based line numbers.
InputData read_records(std::istream& in, const std::string& origin);
InputData read_records_file(const std::string& path);

/// Integer-valued numbers print as exact decimals, everything else with
/// 17 significant digits.
std::string format_number(Real v);

/// Like format_number, with the bracket placeholders spelled -inf / inf.
std::string format_endpoint(Real v);

}  // namespace threshcal::io

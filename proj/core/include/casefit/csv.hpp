#pragma once

#include <string>
#include <vector>

#include "casefit/types.hpp"

namespace casefit {

/// A named-column table: header row, one row per case, comma separators,
/// decimal points, no thousands separators.
struct Dataset {
  std::vector<std::string> columns;
  Matrix values;  // one row per case

  Index n() const { return values.rows(); }
  bool has_column(const std::string& name) const;
  Vector column(const std::string& name) const;  // throws ShapeError if absent
  /// All columns except the named ones, in file order.
  Matrix columns_except(const std::vector<std::string>& excluded) const;
};

Dataset read_csv(const std::string& path);
Dataset parse_csv(const std::string& text);

/// Round-trip safe: values are written with enough digits to re-read
/// bit-identically.
void write_csv(const std::string& path, const Dataset& data);

std::string format_csv(const Dataset& data);

}  // namespace casefit

#include "casefit/csv.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace casefit {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    // trim surrounding whitespace
    const auto begin = field.find_first_not_of(" \t\r");
    const auto end = field.find_last_not_of(" \t\r");
    fields.push_back(begin == std::string::npos ? "" : field.substr(begin, end - begin + 1));
  }
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

}  // namespace

bool Dataset::has_column(const std::string& name) const {
  return std::find(columns.begin(), columns.end(), name) != columns.end();
}

Vector Dataset::column(const std::string& name) const {
  for (std::size_t j = 0; j < columns.size(); ++j)
    if (columns[j] == name) return values.col(static_cast<Index>(j));
  throw ShapeError("dataset has no column named '" + name + "'");
}

Matrix Dataset::columns_except(const std::vector<std::string>& excluded) const {
  std::vector<Index> keep;
  for (std::size_t j = 0; j < columns.size(); ++j)
    if (std::find(excluded.begin(), excluded.end(), columns[j]) == excluded.end())
      keep.push_back(static_cast<Index>(j));
  Matrix out(values.rows(), static_cast<Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) out.col(static_cast<Index>(j)) = values.col(keep[j]);
  return out;
}

Dataset parse_csv(const std::string& text) {
  std::stringstream ss(text);
  std::string line;
  Dataset data;
  std::vector<std::vector<double>> rows;
  bool header_done = false;
  while (std::getline(ss, line)) {
    if (line.empty() || line == "\r") continue;
    auto fields = split_line(line);
    if (!header_done) {
      data.columns = fields;
      header_done = true;
      continue;
    }
    if (fields.size() != data.columns.size())
      throw ShapeError("csv row has " + std::to_string(fields.size()) + " fields, header has " +
                       std::to_string(data.columns.size()));
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) {
      std::size_t used = 0;
      double v;
      try {
        v = std::stod(f, &used);
      } catch (const std::exception&) {
        throw ShapeError("csv field '" + f + "' is not a number");
      }
      if (used != f.size()) throw ShapeError("csv field '" + f + "' is not a number");
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  if (!header_done) throw ShapeError("csv input is empty");
  data.values = Matrix(static_cast<Index>(rows.size()), static_cast<Index>(data.columns.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      data.values(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  return data;
}

Dataset read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ShapeError("cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str());
}

std::string format_csv(const Dataset& data) {
  std::string out;
  for (std::size_t j = 0; j < data.columns.size(); ++j) {
    if (j) out += ',';
    out += data.columns[j];
  }
  out += '\n';
  char buf[40];
  for (Index i = 0; i < data.values.rows(); ++i) {
    for (Index j = 0; j < data.values.cols(); ++j) {
      if (j) out += ',';
      std::snprintf(buf, sizeof buf, "%.17g", data.values(i, j));
      out += buf;
    }
    out += '\n';
  }
  return out;
}

void write_csv(const std::string& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw ShapeError("cannot write '" + path + "'");
  out << format_csv(data);
}

}  // namespace casefit

#include "upimh/csv.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace upimh {

void ResultTable::add_row(std::vector<double> row) {
  if (row.size() != columns.size())
    throw std::invalid_argument("ResultTable: row width does not match header");
  rows.push_back(std::move(row));
}

void ResultTable::write_csv(std::ostream& os) const {
  for (size_t j = 0; j < columns.size(); ++j) {
    if (j) os << ',';
    os << columns[j];
  }
  os << '\n';
  std::ostringstream cell;
  cell.precision(17);
  for (const auto& row : rows) {
    for (size_t j = 0; j < row.size(); ++j) {
      if (j) os << ',';
      cell.str("");
      cell << row[j];
      os << cell.str();
    }
    os << '\n';
  }
}

void ResultTable::write_csv_file(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  write_csv(os);
  if (!os) throw std::runtime_error("write failed: " + path);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) cells.push_back(cell);
  return cells;
}

bool parse_double(const std::string& s, double& out) {
  try {
    size_t pos = 0;
    out = std::stod(s, &pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    return pos == s.size();
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

ObservationSeries read_observation_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open: " + path);

  std::vector<std::vector<double>> parsed;
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto cells = split_csv_line(line);
    std::vector<double> row(cells.size());
    bool ok = !cells.empty();
    for (size_t j = 0; ok && j < cells.size(); ++j) ok = parse_double(cells[j], row[j]);
    if (!ok) {
      if (first) { first = false; continue; }  // header row
      throw std::runtime_error("bad numeric row in " + path + ": " + line);
    }
    first = false;
    if (!parsed.empty() && row.size() != parsed.front().size())
      throw std::runtime_error("ragged rows in " + path);
    for (double v : row)
      if (!std::isfinite(v)) throw std::runtime_error("non-finite observation in " + path);
    parsed.push_back(std::move(row));
  }
  if (parsed.empty()) throw std::runtime_error("no observations in " + path);

  ObservationSeries obs(static_cast<int>(parsed.size()),
                        static_cast<int>(parsed.front().size()));
  for (size_t t = 0; t < parsed.size(); ++t)
    std::copy(parsed[t].begin(), parsed[t].end(), obs.row(static_cast<int>(t)).begin());
  return obs;
}

void write_observation_csv(const ObservationSeries& obs, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  for (int j = 0; j < obs.dim; ++j) {
    if (j) os << ',';
    os << "y_" << (j + 1);
  }
  os << '\n';
  os.precision(17);
  for (int t = 0; t < obs.horizon; ++t) {
    const auto row = obs.row(t);
    for (int j = 0; j < obs.dim; ++j) {
      if (j) os << ',';
      os << row[j];
    }
    os << '\n';
  }
  if (!os) throw std::runtime_error("write failed: " + path);
}

}  // namespace upimh

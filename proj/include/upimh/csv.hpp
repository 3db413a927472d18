#ifndef UPIMH_CSV_HPP
#define UPIMH_CSV_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "upimh/types.hpp"

namespace upimh {

// All-numeric result table with a header row; the CSV surface of every
// experiment kind.
struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_row(std::vector<double> row);
  void write_csv(std::ostream& os) const;
  void write_csv_file(const std::string& path) const;
};

// Observation series as CSV: one row per time step, columns y_1..y_d.
// A single header row of non-numeric labels is skipped if present.
ObservationSeries read_observation_csv(const std::string& path);
void write_observation_csv(const ObservationSeries& obs, const std::string& path);

}  // namespace upimh

#endif

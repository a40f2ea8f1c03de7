#pragma once

#include "types.hpp"

#include <string>
#include <vector>

namespace bridge {

// Full-precision decimal formatting (17 significant digits) so rerun outputs
// compare byte-identically.
std::string format_double(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  Eigen::Index col_index(const std::string& name) const;
};

// Parses a numeric CSV with a header row; reports the line number on failure.
CsvTable read_csv(const std::string& path);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const Matrix& rows);

// Dataset file: header row, one named response column, remaining columns form
// the design matrix in file order.
Dataset dataset_from_csv(const std::string& path, const std::string& response_column);
void dataset_to_csv(const std::string& path, const Dataset& d, const std::string& response_column);

// Chain file: beta_1..beta_p, gamma, alpha, lambda_1..lambda_p, kappa_1..kappa_p.
void chain_to_csv(const std::string& path, const ChainOutput& out);
ChainOutput chain_from_csv(const std::string& path);

}  // namespace bridge

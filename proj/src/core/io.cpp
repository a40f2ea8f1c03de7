#include "io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace bridge {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Eigen::Index CsvTable::col_index(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<Eigen::Index>(i);
  throw ValidationError("csv: no column named '" + name + "'");
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    // trim surrounding whitespace
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

}  // namespace

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("csv: cannot open '" + path + "'");
  CsvTable table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto fields = split_line(line);
    if (lineno == 1) {
      table.header = fields;
      continue;
    }
    if (fields.size() != table.header.size())
      throw ValidationError("csv: line " + std::to_string(lineno) + " of '" + path + "' has " +
                            std::to_string(fields.size()) + " fields, expected " +
                            std::to_string(table.header.size()));
    std::vector<double> row(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
      try {
        std::size_t pos = 0;
        row[i] = std::stod(fields[i], &pos);
        if (pos != fields[i].size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        throw ValidationError("csv: line " + std::to_string(lineno) + " of '" + path +
                              "': cannot parse '" + fields[i] + "' as a number");
      }
    }
    table.rows.push_back(std::move(row));
  }
  if (table.header.empty()) throw ValidationError("csv: '" + path + "' has no header row");
  return table;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const Matrix& rows) {
  std::ofstream out(path);
  if (!out) throw RuntimeFailure("csv: cannot write '" + path + "'");
  for (std::size_t i = 0; i < header.size(); ++i)
    out << header[i] << (i + 1 == header.size() ? "\n" : ",");
  for (Eigen::Index r = 0; r < rows.rows(); ++r)
    for (Eigen::Index c = 0; c < rows.cols(); ++c)
      out << format_double(rows(r, c)) << (c + 1 == rows.cols() ? "\n" : ",");
  if (!out) throw RuntimeFailure("csv: write to '" + path + "' failed");
}

Dataset dataset_from_csv(const std::string& path, const std::string& response_column) {
  CsvTable t = read_csv(path);
  const Eigen::Index yc = t.col_index(response_column);
  const auto n = static_cast<Eigen::Index>(t.rows.size());
  const auto total = static_cast<Eigen::Index>(t.header.size());
  if (n < 1 || total < 2)
    throw ValidationError("dataset: '" + path + "' needs at least one row and one predictor");
  Dataset d;
  d.y.resize(n);
  d.X.resize(n, total - 1);
  for (Eigen::Index r = 0; r < n; ++r) {
    Eigen::Index k = 0;
    for (Eigen::Index c = 0; c < total; ++c) {
      if (c == yc)
        d.y[r] = t.rows[r][c];
      else
        d.X(r, k++) = t.rows[r][c];
    }
  }
  d.standardized.assign(total - 1, false);
  d.validate();
  return d;
}

void dataset_to_csv(const std::string& path, const Dataset& d, const std::string& response_column) {
  std::vector<std::string> header{response_column};
  for (Eigen::Index j = 0; j < d.p(); ++j) header.push_back("x" + std::to_string(j + 1));
  Matrix rows(d.n(), d.p() + 1);
  rows.col(0) = d.y;
  rows.rightCols(d.p()) = d.X;
  write_csv(path, header, rows);
}

void chain_to_csv(const std::string& path, const ChainOutput& out) {
  std::vector<std::string> header;
  const Eigen::Index p = out.p;
  for (Eigen::Index i = 0; i < p; ++i) header.push_back("beta_" + std::to_string(i + 1));
  header.push_back("gamma");
  header.push_back("alpha");
  for (Eigen::Index i = 0; i < p; ++i) header.push_back("lambda_" + std::to_string(i + 1));
  for (Eigen::Index i = 0; i < p; ++i) header.push_back("kappa_" + std::to_string(i + 1));
  write_csv(path, header, out.draws);
}

ChainOutput chain_from_csv(const std::string& path) {
  CsvTable t = read_csv(path);
  const auto dim = static_cast<Eigen::Index>(t.header.size());
  if (dim < 5 || (dim - 2) % 3 != 0)
    throw ValidationError("chain: '" + path + "' does not have 3p+2 columns");
  ChainOutput out;
  out.p = (dim - 2) / 3;
  if (t.header[0] != "beta_1" || t.header[out.p] != "gamma" || t.header[out.p + 1] != "alpha")
    throw ValidationError("chain: '" + path + "' has unexpected column names");
  out.draws.resize(static_cast<Eigen::Index>(t.rows.size()), dim);
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    for (Eigen::Index c = 0; c < dim; ++c)
      out.draws(static_cast<Eigen::Index>(r), c) = t.rows[r][c];
  out.accept_beta.assign(out.p, 0);
  return out;
}

}  // namespace bridge

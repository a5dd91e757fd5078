#include "impute/dataset.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <utility>

#include "impute/errors.hpp"

namespace impute {

std::string_view column_name(Column c) {
  switch (c) {
    case Column::x1: return "x1";
    case Column::x2: return "x2";
    case Column::y: return "y";
  }
  return "?";
}

Column parse_column(std::string_view name) {
  if (name == "x1") return Column::x1;
  if (name == "x2") return Column::x2;
  if (name == "y") return Column::y;
  throw InvalidArgument("unknown column '" + std::string(name) + "'");
}

const Vector& Dataset::column(Column c) const {
  switch (c) {
    case Column::x1: return x1;
    case Column::x2: return x2;
    case Column::y: return y;
  }
  throw InvalidArgument("bad column");
}

Vector& Dataset::column(Column c) { return const_cast<Vector&>(std::as_const(*this).column(c)); }

void Dataset::validate() const {
  if (x1.size() != y.size() || x2.size() != y.size()) {
    throw InvalidArgument("dataset columns differ in length");
  }
  if (!x1.allFinite() || !x2.allFinite() || !y.allFinite()) {
    throw InvalidArgument("dataset contains non-finite values");
  }
}

Dataset Dataset::rows(const std::vector<Index>& index) const {
  const auto n = static_cast<Index>(index.size());
  Dataset out{Vector(n), Vector(n), Vector(n)};
  for (Index i = 0; i < n; ++i) {
    const Index r = index[static_cast<std::size_t>(i)];
    if (r < 0 || r >= size()) throw InvalidArgument("row index out of range");
    out.x1[i] = x1[r];
    out.x2[i] = x2[r];
    out.y[i] = y[r];
  }
  return out;
}

std::vector<Index> IncompleteDataset::observed_rows() const {
  std::vector<Index> rows;
  rows.reserve(static_cast<std::size_t>(observed_count()));
  for (Index i = 0; i < mask.size(); ++i)
    if (!mask[i]) rows.push_back(i);
  return rows;
}

std::vector<Index> IncompleteDataset::missing_rows() const {
  std::vector<Index> rows;
  rows.reserve(static_cast<std::size_t>(missing_count()));
  for (Index i = 0; i < mask.size(); ++i)
    if (mask[i]) rows.push_back(i);
  return rows;
}

Eigen::MatrixX2d predictor_matrix(const Dataset& data, const std::vector<Index>& rows) {
  Eigen::MatrixX2d X(static_cast<Index>(rows.size()), 2);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    X(static_cast<Index>(i), 0) = data.x1[rows[i]];
    X(static_cast<Index>(i), 1) = data.x2[rows[i]];
  }
  return X;
}

Eigen::MatrixX2d predictor_matrix(const Dataset& data) {
  Eigen::MatrixX2d X(data.size(), 2);
  X.col(0) = data.x1;
  X.col(1) = data.x2;
  return X;
}

void write_csv(std::ostream& out, const Dataset& data) {
  out << "x1,x2,y\n";
  char buf[64];
  for (Index i = 0; i < data.size(); ++i) {
    for (int c = 0; c < 3; ++c) {
      const double v = c == 0 ? data.x1[i] : c == 1 ? data.x2[i] : data.y[i];
      auto res = std::to_chars(buf, buf + sizeof buf, v);
      out.write(buf, res.ptr - buf);
      out.put(c == 2 ? '\n' : ',');
    }
  }
}

Dataset read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("read_csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "x1,x2,y") throw InvalidArgument("read_csv: expected header 'x1,x2,y', got '" + line + "'");
  std::vector<double> cols[3];
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::string_view rest(line);
    for (int c = 0; c < 3; ++c) {
      const auto comma = rest.find(',');
      if ((c < 2) == (comma == std::string_view::npos)) {
        throw InvalidArgument("read_csv: line " + std::to_string(line_no) + " does not have 3 fields");
      }
      const std::string_view field = rest.substr(0, comma);
      double v = 0.0;
      auto res = std::from_chars(field.data(), field.data() + field.size(), v);
      if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
        throw InvalidArgument("read_csv: bad number '" + std::string(field) + "' on line " + std::to_string(line_no));
      }
      cols[c].push_back(v);
      rest = comma == std::string_view::npos ? std::string_view() : rest.substr(comma + 1);
    }
  }
  Dataset out;
  out.x1 = Eigen::Map<const Vector>(cols[0].data(), static_cast<Index>(cols[0].size()));
  out.x2 = Eigen::Map<const Vector>(cols[1].data(), static_cast<Index>(cols[1].size()));
  out.y = Eigen::Map<const Vector>(cols[2].data(), static_cast<Index>(cols[2].size()));
  out.validate();
  return out;
}

}  // namespace impute

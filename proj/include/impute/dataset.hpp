#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace impute {

using Eigen::Index;
using Vector = Eigen::VectorXd;
using Mask = Eigen::Array<bool, Eigen::Dynamic, 1>;

enum class Column { x1, x2, y };

std::string_view column_name(Column c);

/// Parses "x1", "x2" or "y"; anything else is an InvalidArgument.
Column parse_column(std::string_view name);

/// Three equal-length columns: predictors x1, x2 and outcome y.
struct Dataset {
  Vector x1;
  Vector x2;
  Vector y;

  Index size() const { return y.size(); }

  const Vector& column(Column c) const;
  Vector& column(Column c);

  /// Throws InvalidArgument on unequal lengths or non-finite entries.
  void validate() const;

  /// Rows selected by index, in the given order.
  Dataset rows(const std::vector<Index>& index) const;
};

/// A dataset with missing outcomes. Masked y entries are NaN in `data`; the
/// pre-amputation outcome lives in `truth_y` for evaluation only.
struct IncompleteDataset {
  Dataset data;
  Mask mask;  // true = y missing
  Vector truth_y;

  Index size() const { return data.size(); }
  Index missing_count() const { return mask.count(); }
  Index observed_count() const { return size() - missing_count(); }

  std::vector<Index> observed_rows() const;
  std::vector<Index> missing_rows() const;
};

/// n x 2 matrix [x1 x2] for the selected rows.
Eigen::MatrixX2d predictor_matrix(const Dataset& data, const std::vector<Index>& rows);
Eigen::MatrixX2d predictor_matrix(const Dataset& data);

/// CSV with header `x1,x2,y`.
void write_csv(std::ostream& out, const Dataset& data);
Dataset read_csv(std::istream& in);

}  // namespace impute

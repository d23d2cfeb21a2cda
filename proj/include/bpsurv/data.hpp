#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bpsurv/types.hpp"

namespace bpsurv {

struct CovariateSpec {
  std::string column;
  bool categorical = false;
  std::string reference;  // categorical only; empty = smallest level
};

// Raw parsed CSV: header plus string cells, row order preserved.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column_index(const std::string& name) const;
};

CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::string& path);

struct DummyEncoding {
  MatrixXd columns;                 // n x L indicator matrix
  std::vector<std::string> levels;  // non-reference level labels, column order
};

// Reference-coded indicators: one column per non-reference level, ordered by
// first appearance after the reference. A single-level factor yields zero
// columns (warning case, not an error).
DummyEncoding encode_dummies(const std::vector<std::string>& raw_column,
                             const std::string& reference);

std::pair<MatrixXd, StandardizationParams> standardize(const MatrixXd& design);
MatrixXd destandardize(const MatrixXd& z, const StandardizationParams& params);

SurvivalDataset build_dataset(const CsvTable& table,
                              const std::string& time_col,
                              const std::string& status_col,
                              const std::vector<CovariateSpec>& covariates);

SurvivalDataset load_csv(const std::string& path, const std::string& time_col,
                         const std::string& status_col,
                         const std::vector<CovariateSpec>& covariates);

// Built-in datasets, embedded verbatim from their published tables.
// Names: "larynx", "veteran".
std::string_view fixture_csv(const std::string& name);

struct FixtureSpec {
  std::string time_col;
  std::string status_col;
  std::vector<CovariateSpec> covariates;
};
FixtureSpec fixture_default_spec(const std::string& name);

SurvivalDataset load_fixture(const std::string& name);

}  // namespace bpsurv

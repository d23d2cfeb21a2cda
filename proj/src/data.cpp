#include "bpsurv/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace bpsurv {

void SurvivalDataset::validate() const {
  const auto nn = n();
  if (static_cast<Eigen::Index>(status.size()) != nn ||
      design.rows() != nn)
    fail(ErrorCode::DimensionMismatch, "dataset fields disagree on n");
  if (static_cast<Eigen::Index>(column_names.size()) != design.cols())
    fail(ErrorCode::DimensionMismatch, "column names disagree with design");
  for (Eigen::Index i = 0; i < nn; ++i) {
    if (!(times[i] > 0.0) || !std::isfinite(times[i]))
      fail(ErrorCode::NonPositiveTime,
           "time at row " + std::to_string(i + 1) +
               " is not strictly positive and finite");
    if (status[i] != 0 && status[i] != 1)
      fail(ErrorCode::InvalidStatus,
           "status at row " + std::to_string(i + 1) + " is not 0/1");
  }
  if (!design.array().isFinite().all())
    fail(ErrorCode::UnparseableCell, "design matrix has non-finite cells");
}

int CsvTable::column_index(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end())
    fail(ErrorCode::MissingColumn, "column '" + name + "' not found");
  return static_cast<int>(it - header.begin());
}

namespace {

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_double(const std::string& cell, int row, const std::string& col) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(cell, &pos);
    if (pos != cell.size())
      fail(ErrorCode::UnparseableCell,
           "cell '" + cell + "' at row " + std::to_string(row) +
               ", column '" + col + "' is not numeric");
    return v;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    fail(ErrorCode::UnparseableCell,
         "cell '" + cell + "' at row " + std::to_string(row) + ", column '" +
             col + "' is not numeric");
  }
}

}  // namespace

CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  std::stringstream ss{std::string(text)};
  std::string line;
  bool first = true;
  while (std::getline(ss, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto cells = split_line(line);
    if (first) {
      table.header = std::move(cells);
      first = false;
    } else {
      if (cells.size() != table.header.size())
        fail(ErrorCode::UnparseableCell,
             "row " + std::to_string(table.rows.size() + 1) +
                 " has wrong cell count");
      table.rows.push_back(std::move(cells));
    }
  }
  if (first) fail(ErrorCode::EmptyData, "csv has no header row");
  return table;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str());
}

DummyEncoding encode_dummies(const std::vector<std::string>& raw_column,
                             const std::string& reference) {
  if (raw_column.empty())
    fail(ErrorCode::EmptyData, "factor column is empty");
  if (std::find(raw_column.begin(), raw_column.end(), reference) ==
      raw_column.end())
    fail(ErrorCode::UnknownReference,
         "reference level '" + reference + "' does not occur");

  DummyEncoding enc;
  for (const auto& label : raw_column) {
    if (label == reference) continue;
    if (std::find(enc.levels.begin(), enc.levels.end(), label) ==
        enc.levels.end())
      enc.levels.push_back(label);
  }
  const auto n = static_cast<Eigen::Index>(raw_column.size());
  const auto L = static_cast<Eigen::Index>(enc.levels.size());
  enc.columns = MatrixXd::Zero(n, L);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto it =
        std::find(enc.levels.begin(), enc.levels.end(), raw_column[i]);
    if (it != enc.levels.end())
      enc.columns(i, it - enc.levels.begin()) = 1.0;
  }
  return enc;
}

std::pair<MatrixXd, StandardizationParams> standardize(const MatrixXd& design) {
  const auto n = design.rows();
  const auto p = design.cols();
  if (n < 2) fail(ErrorCode::DegenerateData, "standardize needs n >= 2");

  StandardizationParams params;
  params.means.resize(p);
  params.sds.resize(p);
  MatrixXd z(n, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double mean = design.col(j).mean();
    const double ss = (design.col(j).array() - mean).square().sum();
    const double sd = std::sqrt(ss / (n - 1));
    if (!(sd > 0.0))
      fail(ErrorCode::ZeroVariance,
           "column " + std::to_string(j) + " is constant");
    params.means[j] = mean;
    params.sds[j] = sd;
    z.col(j) = (design.col(j).array() - mean) / sd;
  }
  return {z, params};
}

MatrixXd destandardize(const MatrixXd& z, const StandardizationParams& params) {
  MatrixXd x(z.rows(), z.cols());
  for (Eigen::Index j = 0; j < z.cols(); ++j)
    x.col(j) = z.col(j).array() * params.sds[j] + params.means[j];
  return x;
}

SurvivalDataset build_dataset(const CsvTable& table,
                              const std::string& time_col,
                              const std::string& status_col,
                              const std::vector<CovariateSpec>& covariates) {
  const int ti = table.column_index(time_col);
  const int si = table.column_index(status_col);
  const auto n = static_cast<Eigen::Index>(table.rows.size());
  if (n == 0) fail(ErrorCode::EmptyData, "csv has no data rows");

  SurvivalDataset ds;
  ds.times.resize(n);
  ds.status.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int row = static_cast<int>(i) + 1;
    ds.times[i] = parse_double(table.rows[i][ti], row, time_col);
    if (!(ds.times[i] > 0.0))
      fail(ErrorCode::NonPositiveTime,
           "time at row " + std::to_string(row) + " must be positive");
    const double s = parse_double(table.rows[i][si], row, status_col);
    if (s != 0.0 && s != 1.0)
      fail(ErrorCode::InvalidStatus,
           "status at row " + std::to_string(row) + " must be 0 or 1");
    ds.status[i] = static_cast<int>(s);
  }

  std::vector<VectorXd> cols;
  for (const auto& spec : covariates) {
    const int ci = table.column_index(spec.column);
    if (spec.categorical) {
      std::vector<std::string> labels(n);
      for (Eigen::Index i = 0; i < n; ++i) labels[i] = table.rows[i][ci];
      std::string ref = spec.reference;
      if (ref.empty()) ref = *std::min_element(labels.begin(), labels.end());
      const auto enc = encode_dummies(labels, ref);
      for (Eigen::Index j = 0; j < enc.columns.cols(); ++j) {
        cols.push_back(enc.columns.col(j));
        ds.column_names.push_back(spec.column + "=" + enc.levels[j]);
      }
    } else {
      VectorXd col(n);
      for (Eigen::Index i = 0; i < n; ++i)
        col[i] =
            parse_double(table.rows[i][ci], static_cast<int>(i) + 1,
                         spec.column);
      cols.push_back(std::move(col));
      ds.column_names.push_back(spec.column);
    }
  }

  ds.design.resize(n, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j)
    ds.design.col(static_cast<Eigen::Index>(j)) = cols[j];
  ds.validate();
  return ds;
}

SurvivalDataset load_csv(const std::string& path, const std::string& time_col,
                         const std::string& status_col,
                         const std::vector<CovariateSpec>& covariates) {
  return build_dataset(read_csv(path), time_col, status_col, covariates);
}

SurvivalDataset load_fixture(const std::string& name) {
  const auto spec = fixture_default_spec(name);
  return build_dataset(parse_csv(fixture_csv(name)), spec.time_col,
                       spec.status_col, spec.covariates);
}

}  // namespace bpsurv

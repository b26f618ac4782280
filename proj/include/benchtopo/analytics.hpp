#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "benchtopo/metrics.hpp"
#include "benchtopo/records.hpp"

namespace benchtopo {

inline constexpr std::array<const char*, 8> kIndicatorNames = {
    "model_count",        "mean_log10_parameters", "distinct_manufacturers",
    "distinct_countries", "mean_modality_count",   "documented_share",
    "open_weights_share", "permissive_share",
};

/// Eight z-scored ecosystem indicators per release year. Columns are
/// z-scored with the population standard deviation. A year x metric cell
/// with no reporting models (possible only for mean-log-parameters and
/// mean-modality-count) takes the column mean of the observed years, which
/// z-scores to 0.
struct YearlyIndicators {
  std::vector<int> years;
  std::vector<std::array<double, 8>> metrics;  // one row per year
};

inline YearlyIndicators derive_indicators(std::span<const ModelRecord> models) {
  if (models.empty()) throw std::invalid_argument("derive_indicators: no records");
  struct Bucket {
    std::size_t count = 0;
    double log_param_sum = 0;
    std::size_t log_param_n = 0;
    std::set<std::string> manufacturers;
    std::set<std::string> countries;
    double modality_sum = 0;
    std::size_t documented = 0, open_weights = 0, permissive = 0;
  };
  std::map<int, Bucket> by_year;
  for (const auto& m : models) {
    auto& b = by_year[int(m.release_date.year())];
    ++b.count;
    if (m.parameter_count) {
      b.log_param_sum += std::log10(static_cast<double>(*m.parameter_count));
      ++b.log_param_n;
    }
    if (!m.manufacturer.empty()) b.manufacturers.insert(m.manufacturer);
    if (!m.country.empty() && m.country != "Unknown") b.countries.insert(m.country);
    b.modality_sum += static_cast<double>(m.modalities.size());
    if (m.documented) ++b.documented;
    if (m.weights_access == WeightsAccess::Open) ++b.open_weights;
    if (m.license_class == LicenseClass::Permissive) ++b.permissive;
  }

  YearlyIndicators ind;
  for (const auto& [year, b] : by_year) {
    ind.years.push_back(year);
    const double n = static_cast<double>(b.count);
    std::array<double, 8> row{};
    row[0] = n;
    row[1] = b.log_param_n ? b.log_param_sum / static_cast<double>(b.log_param_n)
                           : std::numeric_limits<double>::quiet_NaN();
    row[2] = static_cast<double>(b.manufacturers.size());
    row[3] = static_cast<double>(b.countries.size());
    row[4] = b.modality_sum / n;
    row[5] = static_cast<double>(b.documented) / n;
    row[6] = static_cast<double>(b.open_weights) / n;
    row[7] = static_cast<double>(b.permissive) / n;
    ind.metrics.push_back(row);
  }

  const std::size_t ny = ind.years.size();
  for (std::size_t c = 0; c < 8; ++c) {
    double sum = 0;
    std::size_t observed = 0;
    for (std::size_t r = 0; r < ny; ++r)
      if (!std::isnan(ind.metrics[r][c])) {
        sum += ind.metrics[r][c];
        ++observed;
      }
    if (observed == 0)
      throw std::runtime_error(std::string("indicator column '") + kIndicatorNames[c] +
                               "' has no observations");
    const double mean_observed = sum / static_cast<double>(observed);
    for (std::size_t r = 0; r < ny; ++r)
      if (std::isnan(ind.metrics[r][c])) ind.metrics[r][c] = mean_observed;
    double mean = 0;
    for (std::size_t r = 0; r < ny; ++r) mean += ind.metrics[r][c];
    mean /= static_cast<double>(ny);
    double var = 0;
    for (std::size_t r = 0; r < ny; ++r) {
      const double d = ind.metrics[r][c] - mean;
      var += d * d;
    }
    var /= static_cast<double>(ny);  // population variance
    if (!(var > 0))
      throw std::runtime_error(std::string("indicator column '") + kIndicatorNames[c] +
                               "' has zero variance");
    const double sd = std::sqrt(var);
    for (std::size_t r = 0; r < ny; ++r) ind.metrics[r][c] = (ind.metrics[r][c] - mean) / sd;
  }
  return ind;
}

struct PcaResult {
  std::vector<std::vector<double>> components;  // retained loadings, unit norm
  std::vector<double> explained_variance_ratio; // for the retained components
  std::vector<std::vector<double>> scores;      // per-row coordinates
};

/// PCA via eigendecomposition of the population column covariance.
/// Components are ordered by eigenvalue descending; each loading vector is
/// flipped so its largest-magnitude entry is positive.
inline PcaResult pca_of_matrix(const Eigen::MatrixXd& data, std::size_t n_components) {
  const auto rows = data.rows();
  const auto cols = data.cols();
  if (rows < 2) throw std::invalid_argument("pca: need at least 2 rows");
  if (n_components == 0 || n_components > static_cast<std::size_t>(cols))
    throw std::invalid_argument("pca: n_components out of range");

  Eigen::MatrixXd centered = data.rowwise() - data.colwise().mean();
  Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(rows);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw std::runtime_error("pca: eigensolver failed");

  // SelfAdjointEigenSolver returns ascending eigenvalues.
  std::vector<Eigen::Index> order(cols);
  for (Eigen::Index i = 0; i < cols; ++i) order[i] = cols - 1 - i;
  const auto& values = solver.eigenvalues();
  const auto& vectors = solver.eigenvectors();

  double total = 0.0;
  for (Eigen::Index i = 0; i < cols; ++i) total += std::max(values[i], 0.0);
  if (!(total > 0)) throw std::runtime_error("pca: zero total variance");

  PcaResult result;
  for (std::size_t k = 0; k < n_components; ++k) {
    Eigen::VectorXd v = vectors.col(order[k]);
    Eigen::Index argmax = 0;
    v.cwiseAbs().maxCoeff(&argmax);
    if (v[argmax] < 0) v = -v;
    result.components.emplace_back(v.data(), v.data() + v.size());
    result.explained_variance_ratio.push_back(std::max(values[order[k]], 0.0) / total);
    Eigen::VectorXd score = centered * v;
    if (result.scores.empty()) result.scores.assign(rows, {});
    for (Eigen::Index r = 0; r < rows; ++r) result.scores[r].push_back(score[r]);
  }
  return result;
}

inline PcaResult pca(const YearlyIndicators& indicators, std::size_t n_components) {
  const std::size_t ny = indicators.years.size();
  if (n_components > 8) throw std::invalid_argument("pca: n_components must be <= 8");
  if (n_components > ny) throw std::invalid_argument("pca: n_components exceeds year count");
  Eigen::MatrixXd m(ny, 8);
  for (std::size_t r = 0; r < ny; ++r)
    for (std::size_t c = 0; c < 8; ++c) m(r, c) = indicators.metrics[r][c];
  return pca_of_matrix(m, n_components);
}

struct CountryPareto {
  struct Row {
    std::string country;
    double count = 0;
    double cumulative_share = 0;
  };
  std::vector<Row> rows;  // sorted by count descending
  double gini = 0;
};

/// Fractional benchmark counts per origin country: each record contributes
/// 1/n over its distinct affiliation countries ("Unknown" when none), so
/// multi-country benchmarks are not double-counted and total mass equals
/// the record count.
inline CountryPareto country_pareto(std::span<const BenchmarkRecord> records) {
  if (records.empty()) throw std::invalid_argument("country_pareto: no records");
  std::map<std::string, double> counts;
  std::set<std::string> countries;
  for (const auto& rec : records) {
    countries.clear();
    for (const auto& aff : rec.affiliations)
      if (!aff.country.empty()) countries.insert(aff.country);
    if (countries.empty()) countries.insert("Unknown");
    const double credit = 1.0 / static_cast<double>(countries.size());
    for (const auto& c : countries) counts[c] += credit;
  }
  CountryPareto pareto;
  for (const auto& [country, count] : counts) pareto.rows.push_back({country, count, 0.0});
  std::sort(pareto.rows.begin(), pareto.rows.end(), [](const auto& a, const auto& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.country < b.country;
  });
  const double total = static_cast<double>(records.size());
  double running = 0.0;
  std::vector<double> values;
  for (auto& row : pareto.rows) {
    running += row.count;
    row.cumulative_share = running / total;
    values.push_back(row.count);
  }
  pareto.gini = gini(values);
  return pareto;
}

}  // namespace benchtopo

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "benchtopo/analytics.hpp"
#include "benchtopo/rng.hpp"

using namespace benchtopo;
using Catch::Matchers::WithinAbs;

namespace {

ModelRecord model(std::string id, int year, std::optional<std::uint64_t> params,
                  std::string manufacturer, std::string country, std::size_t n_modalities,
                  bool documented, WeightsAccess weights, LicenseClass license) {
  ModelRecord m;
  m.id = id;
  m.name = id;
  m.release_date = Date{std::chrono::year{year}, std::chrono::month{3}, std::chrono::day{1}};
  m.parameter_count = params;
  m.manufacturer = std::move(manufacturer);
  m.country = std::move(country);
  for (std::size_t i = 0; i < n_modalities; ++i) m.modalities.push_back("mod" + std::to_string(i));
  m.documented = documented;
  m.weights_access = weights;
  m.license_class = license;
  return m;
}

BenchmarkRecord benchmark_with_countries(std::string id,
                                         const std::vector<std::string>& countries) {
  BenchmarkRecord b;
  b.id = id;
  b.name = id;
  b.release_date = Date{std::chrono::year{2022}, std::chrono::month{1}, std::chrono::day{1}};
  int i = 0;
  for (const auto& c : countries) {
    std::string author = "a" + std::to_string(i++);
    b.authors.push_back(author);
    b.affiliations.push_back({author, "inst-" + c, c});
  }
  return b;
}

std::vector<ModelRecord> varied_fixture() {
  // Five years with variation in every indicator column.
  std::vector<ModelRecord> ms;
  ms.push_back(model("m1", 2019, 1'000'000'000, "A", "US", 1, true, WeightsAccess::Open,
                     LicenseClass::Permissive));
  ms.push_back(model("m2", 2020, 10'000'000'000, "A", "US", 2, false, WeightsAccess::Gated,
                     LicenseClass::Closed));
  ms.push_back(model("m3", 2020, std::nullopt, "B", "CN", 1, true, WeightsAccess::Open,
                     LicenseClass::Community));
  ms.push_back(model("m4", 2021, 50'000'000'000, "C", "UK", 3, false, WeightsAccess::Unspecified,
                     LicenseClass::Closed));
  ms.push_back(model("m5", 2021, 1'000'000'000, "A", "US", 1, true, WeightsAccess::Open,
                     LicenseClass::Permissive));
  ms.push_back(model("m6", 2021, std::nullopt, "D", "FR", 2, false, WeightsAccess::Gated,
                     LicenseClass::Community));
  ms.push_back(model("m7", 2022, 100'000'000'000, "E", "US", 4, true, WeightsAccess::Open,
                     LicenseClass::Permissive));
  ms.push_back(model("m8", 2023, 500'000'000'000, "F", "CA", 2, false, WeightsAccess::Open,
                     LicenseClass::Permissive));
  ms.push_back(model("m9", 2023, 2'000'000'000, "A", "US", 1, true, WeightsAccess::Gated,
                     LicenseClass::Closed));
  return ms;
}

}  // namespace

TEST_CASE("derive_indicators z-scores every column") {
  auto ind = derive_indicators(varied_fixture());
  REQUIRE(ind.years == std::vector<int>{2019, 2020, 2021, 2022, 2023});
  const std::size_t ny = ind.years.size();
  for (std::size_t c = 0; c < 8; ++c) {
    double mean = 0, var = 0;
    for (std::size_t r = 0; r < ny; ++r) mean += ind.metrics[r][c];
    mean /= ny;
    for (std::size_t r = 0; r < ny; ++r) {
      double d = ind.metrics[r][c] - mean;
      var += d * d;
    }
    var /= ny;
    CHECK_THAT(mean, WithinAbs(0.0, 1e-9));
    CHECK_THAT(var, WithinAbs(1.0, 1e-9));
  }
}

TEST_CASE("identical years fail with a named zero-variance column") {
  std::vector<ModelRecord> ms;
  ms.push_back(model("m1", 2020, 1'000'000'000, "A", "US", 1, true, WeightsAccess::Open,
                     LicenseClass::Permissive));
  ms.push_back(model("m2", 2021, 1'000'000'000, "A", "US", 1, true, WeightsAccess::Open,
                     LicenseClass::Permissive));
  CHECK_THROWS_WITH(derive_indicators(ms), Catch::Matchers::ContainsSubstring("model_count"));
}

TEST_CASE("two-point parameter column z-scores to minus one and one") {
  // Years differ in the other columns; exactly one model reports parameters
  // in each year, at 1e9 and 1e12.
  std::vector<ModelRecord> ms;
  ms.push_back(model("m1", 2020, 1'000'000'000, "A", "US", 1, true, WeightsAccess::Open,
                     LicenseClass::Permissive));
  ms.push_back(model("m2", 2020, std::nullopt, "B", "CN", 2, false, WeightsAccess::Gated,
                     LicenseClass::Closed));
  ms.push_back(model("m3", 2021, 1'000'000'000'000, "A", "US", 1, false, WeightsAccess::Gated,
                     LicenseClass::Closed));
  ms.push_back(model("m4", 2021, std::nullopt, "C", "UK", 3, true, WeightsAccess::Open,
                     LicenseClass::Community));
  ms.push_back(model("m5", 2021, std::nullopt, "D", "FR", 1, false, WeightsAccess::Unspecified,
                     LicenseClass::Unspecified));
  auto ind = derive_indicators(ms);
  REQUIRE(ind.years.size() == 2);
  CHECK_THAT(ind.metrics[0][1], WithinAbs(-1.0, 1e-9));
  CHECK_THAT(ind.metrics[1][1], WithinAbs(1.0, 1e-9));
}

TEST_CASE("pca on a rank-1 matrix explains everything in one component") {
  YearlyIndicators ind;
  ind.years = {2020, 2021};
  ind.metrics.push_back({1, 1, 1, 1, 1, 1, 1, 1});
  ind.metrics.push_back({-1, -1, -1, -1, -1, -1, -1, -1});
  auto result = pca(ind, 2);
  REQUIRE(result.explained_variance_ratio.size() == 2);
  CHECK_THAT(result.explained_variance_ratio[0], WithinAbs(1.0, 1e-12));
  CHECK_THAT(result.explained_variance_ratio[1], WithinAbs(0.0, 1e-12));
}

TEST_CASE("pca loadings are unit norm with positive dominant entries") {
  auto ind = derive_indicators(varied_fixture());
  auto result = pca(ind, 3);
  for (const auto& comp : result.components) {
    double norm = 0;
    double max_abs = 0, max_val = 0;
    for (double v : comp) {
      norm += v * v;
      if (std::abs(v) > max_abs) {
        max_abs = std::abs(v);
        max_val = v;
      }
    }
    CHECK_THAT(norm, WithinAbs(1.0, 1e-9));
    CHECK(max_val > 0.0);
  }
  // Ratios are nonincreasing.
  for (std::size_t i = 0; i + 1 < result.explained_variance_ratio.size(); ++i)
    CHECK(result.explained_variance_ratio[i] >= result.explained_variance_ratio[i + 1]);
}

TEST_CASE("pca reconstruction with all components is exact") {
  CounterRng rng(17);
  Eigen::MatrixXd data(9, 8);
  for (int r = 0; r < 9; ++r)
    for (int c = 0; c < 8; ++c) data(r, c) = rng.uniform(r, c) * 10.0 - 5.0;
  auto result = pca_of_matrix(data, 8);

  double ratio_sum = 0;
  for (double r : result.explained_variance_ratio) ratio_sum += r;
  CHECK_THAT(ratio_sum, WithinAbs(1.0, 1e-9));

  Eigen::RowVectorXd mean = data.colwise().mean();
  for (int r = 0; r < 9; ++r)
    for (int c = 0; c < 8; ++c) {
      double rec = mean(c);
      for (std::size_t k = 0; k < 8; ++k)
        rec += result.scores[r][k] * result.components[k][c];
      CHECK_THAT(rec, WithinAbs(data(r, c), 1e-9));
    }
}

TEST_CASE("pca ratios are invariant under row permutation") {
  CounterRng rng(19);
  Eigen::MatrixXd data(7, 8);
  for (int r = 0; r < 7; ++r)
    for (int c = 0; c < 8; ++c) data(r, c) = rng.uniform(r, c);
  auto a = pca_of_matrix(data, 4);
  Eigen::MatrixXd shuffled = data.colwise().reverse();
  auto b = pca_of_matrix(shuffled, 4);
  for (std::size_t k = 0; k < 4; ++k)
    CHECK_THAT(a.explained_variance_ratio[k],
               WithinAbs(b.explained_variance_ratio[k], 1e-12));
}

TEST_CASE("pca on isotropic 2-D data splits variance evenly") {
  CounterRng rng(23);
  const int n = 10000;
  Eigen::MatrixXd data(n, 2);
  for (int i = 0; i < n; ++i) {
    // Box-Muller from the counter stream.
    double u1 = std::max(rng.uniform(i, 0), 1e-12);
    double u2 = rng.uniform(i, 1);
    double r = std::sqrt(-2.0 * std::log(u1));
    data(i, 0) = r * std::cos(2.0 * M_PI * u2);
    data(i, 1) = r * std::sin(2.0 * M_PI * u2);
  }
  auto result = pca_of_matrix(data, 2);
  CHECK_THAT(result.explained_variance_ratio[0], WithinAbs(0.5, 0.05));
  CHECK_THAT(result.explained_variance_ratio[1], WithinAbs(0.5, 0.05));
}

TEST_CASE("pca input validation") {
  YearlyIndicators one;
  one.years = {2020};
  one.metrics.push_back({});
  CHECK_THROWS_AS(pca(one, 1), std::invalid_argument);

  auto ind = derive_indicators(varied_fixture());
  CHECK_THROWS_AS(pca(ind, 9), std::invalid_argument);
  CHECK_THROWS_AS(pca(ind, 0), std::invalid_argument);
  CHECK_THROWS_AS(pca(ind, 6), std::invalid_argument);  // only 5 years
}

TEST_CASE("country pareto closed forms") {
  std::vector<BenchmarkRecord> solo{benchmark_with_countries("b1", {"US"})};
  auto p1 = country_pareto(solo);
  REQUIRE(p1.rows.size() == 1);
  CHECK_THAT(p1.rows[0].cumulative_share, WithinAbs(1.0, 1e-12));

  std::vector<BenchmarkRecord> four;
  four.push_back(benchmark_with_countries("b1", {"A"}));
  four.push_back(benchmark_with_countries("b2", {"A"}));
  four.push_back(benchmark_with_countries("b3", {"A"}));
  four.push_back(benchmark_with_countries("b4", {"B"}));
  auto p4 = country_pareto(four);
  REQUIRE(p4.rows.size() == 2);
  CHECK(p4.rows[0].country == "A");
  CHECK_THAT(p4.rows[0].cumulative_share, WithinAbs(0.75, 1e-12));
  CHECK_THAT(p4.rows[1].cumulative_share, WithinAbs(1.0, 1e-12));
  CHECK_THAT(p4.gini, WithinAbs(gini(std::vector<double>{3.0, 1.0}), 1e-12));
}

TEST_CASE("country pareto uses fractional credit and conserves mass") {
  CounterRng rng(29);
  std::vector<BenchmarkRecord> recs;
  const char* countries[] = {"US", "CN", "UK", "DE", "FR", "CA"};
  for (int b = 0; b < 40; ++b) {
    std::vector<std::string> cs;
    std::size_t n = rng.bits(b, 0) % 4;  // possibly none -> Unknown
    for (std::size_t i = 0; i < n; ++i) cs.push_back(countries[rng.bits(b, 1 + i) % 6]);
    recs.push_back(benchmark_with_countries("b" + std::to_string(b), cs));
  }
  auto p = country_pareto(recs);
  double total = 0;
  for (const auto& row : p.rows) total += row.count;
  CHECK_THAT(total, WithinAbs(40.0, 1e-9));
  CHECK_THAT(p.rows.back().cumulative_share, WithinAbs(1.0, 1e-9));
  for (std::size_t i = 0; i + 1 < p.rows.size(); ++i)
    CHECK(p.rows[i].cumulative_share <= p.rows[i + 1].cumulative_share + 1e-12);

  std::vector<BenchmarkRecord> unlabeled{benchmark_with_countries("b1", {})};
  auto pu = country_pareto(unlabeled);
  REQUIRE(pu.rows.size() == 1);
  CHECK(pu.rows[0].country == "Unknown");
}

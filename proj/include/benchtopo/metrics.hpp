#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "benchtopo/records.hpp"

namespace benchtopo {

struct EngagementSignals {
  std::uint64_t citations = 0;
  std::uint64_t stars = 0;
};

/// Influence weight of one benchmark:
///   a = ln(1 + citations) + blend_alpha * ln(1 + stars).
/// Natural log throughout; any other base rescales every weight uniformly
/// and leaves ranks, Gini, and HHI of shares unchanged.
inline double authority_weight(const EngagementSignals& s, double blend_alpha) {
  if (blend_alpha < 0) throw std::invalid_argument("blend_alpha must be >= 0");
  return std::log1p(static_cast<double>(s.citations)) +
         blend_alpha * std::log1p(static_cast<double>(s.stars));
}

/// Entity name -> nonnegative authority mass, with a cached total.
/// Shares are entries[i] / total().
class AuthorityTable {
 public:
  void add(const std::string& entity, double mass) {
    if (!(mass >= 0.0)) throw std::invalid_argument("authority mass must be >= 0");
    entries_[entity] += mass;
    total_ += mass;
  }

  const std::map<std::string, double>& entries() const { return entries_; }
  double total() const { return total_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  std::vector<double> masses() const {
    std::vector<double> out;
    out.reserve(entries_.size());
    for (const auto& [_, m] : entries_) out.push_back(m);
    return out;
  }

 private:
  std::map<std::string, double> entries_;
  double total_ = 0.0;
};

/// Age/recency adjustment applied to raw benchmark weights before
/// fractional allocation. Ages are fractional years (days / 365.25)
/// between a record's release date and `reference_date`.
struct RobustnessVariant {
  enum class Kind { Baseline, RatePerAge, Windowed, ExponentialDecay };

  Kind kind = Kind::Baseline;
  std::optional<double> window_years;      // Windowed only
  std::optional<double> half_life_years;   // ExponentialDecay only
  double min_age_years = 0.25;             // RatePerAge floor
  Date reference_date{};

  static RobustnessVariant baseline(Date ref) { return {Kind::Baseline, {}, {}, 0.25, ref}; }
  static RobustnessVariant rate_per_age(Date ref, double floor_years = 0.25) {
    return {Kind::RatePerAge, {}, {}, floor_years, ref};
  }
  static RobustnessVariant windowed(Date ref, double window) {
    return {Kind::Windowed, window, {}, 0.25, ref};
  }
  static RobustnessVariant exponential_decay(Date ref, double half_life) {
    return {Kind::ExponentialDecay, {}, half_life, 0.25, ref};
  }

  void validate() const {
    switch (kind) {
      case Kind::Windowed:
        if (!window_years || !(*window_years > 0))
          throw std::invalid_argument("windowed variant requires window_years > 0");
        break;
      case Kind::ExponentialDecay:
        if (!half_life_years || !(*half_life_years > 0))
          throw std::invalid_argument("decay variant requires half_life_years > 0");
        break;
      case Kind::RatePerAge:
        if (!(min_age_years > 0))
          throw std::invalid_argument("rate-per-age variant requires min_age_years > 0");
        break;
      case Kind::Baseline:
        break;
    }
  }

  double apply(double weight, double age_years) const {
    switch (kind) {
      case Kind::Baseline: return weight;
      case Kind::RatePerAge: return weight / std::max(age_years, min_age_years);
      case Kind::Windowed: return age_years <= *window_years ? weight : 0.0;
      case Kind::ExponentialDecay: return weight * std::exp2(-age_years / *half_life_years);
    }
    return weight;
  }
};

enum class GroupBy { Institution, Country };

/// Fractional allocation: each of the n_b distinct entities on benchmark b
/// receives weight(b) / n_b, where weight(b) is the authority weight
/// transformed by `variant`. Records without a single resolvable entity
/// accrue to the "Unknown/unlisted" bucket.
inline AuthorityTable allocate_authority(std::span<const BenchmarkRecord> records,
                                         const RobustnessVariant& variant, double blend_alpha,
                                         GroupBy group_by) {
  if (records.empty()) throw std::invalid_argument("allocate_authority: no records");
  variant.validate();
  AuthorityTable table;
  std::set<std::string> entities;
  for (const auto& rec : records) {
    double age = years_between(rec.release_date, variant.reference_date);
    if (age < 0)
      throw std::invalid_argument("reference_date precedes release date of record '" + rec.id +
                                  "'");
    double weight = variant.apply(authority_weight({rec.citations, rec.stars}, blend_alpha), age);
    entities.clear();
    for (const auto& aff : rec.affiliations) {
      const std::string& label =
          group_by == GroupBy::Institution ? aff.institution : aff.country;
      if (!label.empty()) entities.insert(label);
    }
    if (entities.empty()) entities.insert(kUnknownEntity);
    double share = weight / static_cast<double>(entities.size());
    for (const auto& e : entities) table.add(e, share);
  }
  return table;
}

/// Gini coefficient, population form: the relative mean absolute difference
///   G = sum_i sum_j |x_i - x_j| / (2 n sum x),
/// computed from the sorted values in O(n log n). Permutation- and
/// scale-invariant; 0 means perfect equality.
inline double gini(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("gini: empty input");
  std::vector<double> x(values.begin(), values.end());
  double sum = 0.0;
  for (double v : x) {
    if (v < 0) throw std::invalid_argument("gini: negative value");
    sum += v;
  }
  if (!(sum > 0)) throw std::invalid_argument("gini: undefined for all-zero input");
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    acc += (2.0 * (static_cast<double>(i) + 1.0) - n - 1.0) * x[i];
  return acc / (n * sum);
}

/// Herfindahl-Hirschman index: sum of squared shares. 1 for a monopoly,
/// 1/n for n equal holders.
inline double hhi(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("hhi: empty input");
  double sum = 0.0;
  for (double v : values) {
    if (v < 0) throw std::invalid_argument("hhi: negative value");
    sum += v;
  }
  if (!(sum > 0)) throw std::invalid_argument("hhi: undefined for zero-sum input");
  double acc = 0.0;
  for (double v : values) {
    double s = v / sum;
    acc += s * s;
  }
  return acc;
}

namespace detail {

/// Entities ordered by (mass desc, name asc) — the deterministic ranking
/// used by every top-k metric.
inline std::vector<std::pair<std::string, double>> ranked_entities(const AuthorityTable& table) {
  std::vector<std::pair<std::string, double>> v(table.entries().begin(), table.entries().end());
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return v;
}

}  // namespace detail

/// The k largest shares in nonincreasing order; ties broken by
/// lexicographic entity name.
inline std::vector<std::pair<std::string, double>> top_shares(const AuthorityTable& table,
                                                              std::size_t k) {
  if (k == 0 || k > table.size())
    throw std::invalid_argument("top_shares: k must be in [1, entity count]");
  auto ranked = detail::ranked_entities(table);
  std::vector<std::pair<std::string, double>> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i)
    out.emplace_back(ranked[i].first, ranked[i].second / table.total());
  return out;
}

inline std::vector<std::string> top_entities(const AuthorityTable& table, std::size_t k) {
  if (k == 0 || k > table.size())
    throw std::invalid_argument("top_entities: k must be in [1, entity count]");
  auto ranked = detail::ranked_entities(table);
  std::vector<std::string> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back(ranked[i].first);
  return out;
}

/// Jaccard similarity of the two top-k membership sets.
inline double jaccard_top_k(const AuthorityTable& a, const AuthorityTable& b, std::size_t k) {
  if (k == 0 || k > a.size() || k > b.size())
    throw std::invalid_argument("jaccard_top_k: need >= k entities in both tables");
  auto ta = top_entities(a, k);
  auto tb = top_entities(b, k);
  std::set<std::string> sa(ta.begin(), ta.end()), sb(tb.begin(), tb.end());
  std::size_t inter = 0;
  for (const auto& e : sa) inter += sb.count(e);
  return static_cast<double>(inter) / static_cast<double>(sa.size() + sb.size() - inter);
}

namespace detail {

/// Average ranks (1 = largest) of `values`; equal values share the mean of
/// the ranks they span.
inline std::vector<double> average_ranks(const std::vector<double>& values) {
  std::vector<std::size_t> idx(values.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && values[idx[j + 1]] == values[idx[i]]) ++j;
    double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[idx[t]] = avg;
    i = j + 1;
  }
  return ranks;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 && syy == 0.0) return 1.0;  // identical constant rankings
  if (sxx == 0.0 || syy == 0.0)
    throw std::domain_error("spearman: rank variance is zero in one table");
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace detail

/// Spearman rank correlation over the union of the two top-k sets.
/// Within each table, union members are ranked by mass with average ranks
/// on ties; entities absent from a table rank tied at the bottom of the
/// union (worst-tied rule).
inline double spearman_top_union(const AuthorityTable& a, const AuthorityTable& b, std::size_t k) {
  if (k == 0 || k > a.size() || k > b.size())
    throw std::invalid_argument("spearman_top_union: need >= k entities in both tables");
  auto ta = top_entities(a, k);
  auto tb = top_entities(b, k);
  std::set<std::string> u(ta.begin(), ta.end());
  u.insert(tb.begin(), tb.end());
  if (u.size() < 2) throw std::invalid_argument("spearman_top_union: union has fewer than 2");
  const double absent = -std::numeric_limits<double>::infinity();
  std::vector<double> va, vb;
  va.reserve(u.size());
  vb.reserve(u.size());
  for (const auto& e : u) {
    auto ia = a.entries().find(e);
    auto ib = b.entries().find(e);
    va.push_back(ia == a.entries().end() ? absent : ia->second);
    vb.push_back(ib == b.entries().end() ? absent : ib->second);
  }
  return detail::pearson(detail::average_ranks(va), detail::average_ranks(vb));
}

/// Ordered (year, value) series with values in [0, 1].
struct ConcentrationSeries {
  std::vector<std::pair<int, double>> points;

  void validate() const {
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (i > 0 && points[i].first <= points[i - 1].first)
        throw std::invalid_argument("concentration series: years must be strictly increasing");
      if (points[i].second < 0.0 || points[i].second > 1.0)
        throw std::invalid_argument("concentration series: values must lie in [0, 1]");
    }
  }
};

struct TrendFit {
  double annual_change_rate = 0.0;  // exp(slope) - 1
  double ci_low = 0.0;
  double ci_high = 0.0;
  double slope = 0.0;          // of ln(value) on year
  double slope_stderr = 0.0;
};

/// OLS of ln(value) on year. The annual change rate is exp(slope) - 1; the
/// 95% CI uses the slope's standard error with a Student-t quantile on
/// n - 2 degrees of freedom, transformed the same way.
inline TrendFit trend_fit(const ConcentrationSeries& series) {
  series.validate();
  const std::size_t n = series.points.size();
  if (n < 3) throw std::invalid_argument("trend_fit: need at least 3 points");
  std::vector<double> x, y;
  x.reserve(n);
  y.reserve(n);
  for (const auto& [year, value] : series.points) {
    if (!(value > 0)) throw std::invalid_argument("trend_fit: values must be > 0");
    x.push_back(static_cast<double>(year));
    y.push_back(std::log(value));
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ssr = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = y[i] - (intercept + slope * x[i]);
    ssr += r * r;
  }
  const double dof = static_cast<double>(n - 2);
  const double se = std::sqrt(std::max(ssr, 0.0) / dof / sxx);
  boost::math::students_t_distribution<double> dist(dof);
  const double t = boost::math::quantile(dist, 0.975);
  TrendFit fit;
  fit.slope = slope;
  fit.slope_stderr = se;
  fit.annual_change_rate = std::expm1(slope);
  fit.ci_low = std::expm1(slope - t * se);
  fit.ci_high = std::expm1(slope + t * se);
  return fit;
}

}  // namespace benchtopo

#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "benchtopo/abm.hpp"
#include "benchtopo/csv.hpp"
#include "benchtopo/rng.hpp"

namespace benchtopo {

struct SweepGrid {
  std::vector<double> beta_values;
  std::vector<double> gamma_values;
  std::size_t replicates = 16;
  SimConfig base_config;

  /// The default grid: 11 beta values over [0, 0.05] and 25 log-spaced
  /// gamma values over [1e-6, 2e-3], 16 replicates, alpha=1.5, delta=0.1,
  /// 1e4 steps from a single incumbent.
  static SweepGrid defaults(std::uint64_t master_seed) {
    SweepGrid grid;
    grid.beta_values = linspace(0.0, 0.05, 11);
    grid.gamma_values = logspace(1e-6, 2e-3, 25);
    grid.replicates = 16;
    grid.base_config = SimConfig{};
    grid.base_config.matthew_alpha = 1.5;
    grid.base_config.decay_delta = 0.1;
    grid.base_config.steps = 10000;
    grid.base_config.initial_benchmarks = 1;
    grid.base_config.seed = master_seed;
    return grid;
  }

  static std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
      v[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
  }

  static std::vector<double> logspace(double lo, double hi, std::size_t n) {
    std::vector<double> v(n);
    const double llo = std::log10(lo), lhi = std::log10(hi);
    for (std::size_t i = 0; i < n; ++i)
      v[i] = n == 1 ? lo
                    : std::pow(10.0, llo + (lhi - llo) * static_cast<double>(i) /
                                               static_cast<double>(n - 1));
    return v;
  }

  void validate() const {
    if (beta_values.empty() || gamma_values.empty())
      throw std::invalid_argument("sweep grid: empty axis");
    for (std::size_t i = 1; i < beta_values.size(); ++i)
      if (!(beta_values[i] > beta_values[i - 1]))
        throw std::invalid_argument("sweep grid: beta axis must be strictly increasing");
    for (std::size_t i = 1; i < gamma_values.size(); ++i)
      if (!(gamma_values[i] > gamma_values[i - 1]))
        throw std::invalid_argument("sweep grid: gamma axis must be strictly increasing");
    if (!(gamma_values.front() >= 0))
      throw std::invalid_argument("sweep grid: gamma must be >= 0");
    if (replicates < 1) throw std::invalid_argument("sweep grid: replicates must be >= 1");
    base_config.validate();
  }
};

struct PhaseDiagram {
  SweepGrid grid;
  std::vector<std::vector<double>> mean_hhi;    // [beta][gamma]
  std::vector<std::vector<double>> stderr_hhi;  // [beta][gamma]
};

/// (beta, gamma*) points where the row-wise interpolated mean HHI equals
/// the contour level.
struct TippingContour {
  std::vector<std::pair<double, double>> points;
};

/// Run replicates for every (beta, gamma) cell and reduce to mean and
/// standard error of the steady-state HHI. Replicate seeds derive from
/// (master seed, beta index, gamma index, replicate), and the reduction
/// runs in fixed index order after all workers join, so the result is
/// independent of `jobs` and of scheduling.
inline PhaseDiagram run_sweep(const SweepGrid& grid, unsigned jobs = 1,
                              double tail_fraction = 0.1) {
  grid.validate();
  if (jobs == 0) jobs = 1;
  const std::size_t nb = grid.beta_values.size();
  const std::size_t ng = grid.gamma_values.size();
  const std::size_t nr = grid.replicates;
  const std::size_t total = nb * ng * nr;
  std::vector<double> samples(total);

  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::string error_message;

  auto work = [&](std::size_t item) {
    const std::size_t bi = item / (ng * nr);
    const std::size_t gi = (item / nr) % ng;
    const std::size_t rep = item % nr;
    try {
      SimConfig cfg = grid.base_config;
      cfg.overfit_beta = grid.beta_values[bi];
      cfg.entry_gamma = grid.gamma_values[gi];
      cfg.seed = derive_seed(grid.base_config.seed, bi, gi, rep);
      samples[item] = steady_state_hhi(run(cfg), tail_fraction);
    } catch (const std::exception& e) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!failed.exchange(true))
        error_message = "sweep cell (beta=" + csv::format_double(grid.beta_values[bi]) +
                        ", gamma=" + csv::format_double(grid.gamma_values[gi]) +
                        ", replicate=" + std::to_string(rep) + "): " + e.what();
    }
  };

  if (jobs == 1) {
    for (std::size_t item = 0; item < total && !failed.load(); ++item) work(item);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (unsigned t = 0; t < jobs; ++t)
      pool.emplace_back([&] {
        for (std::size_t item = next.fetch_add(1); item < total && !failed.load();
             item = next.fetch_add(1))
          work(item);
      });
    for (auto& th : pool) th.join();
  }
  if (failed.load()) throw std::runtime_error(error_message);

  PhaseDiagram diagram;
  diagram.grid = grid;
  diagram.mean_hhi.assign(nb, std::vector<double>(ng, 0.0));
  diagram.stderr_hhi.assign(nb, std::vector<double>(ng, 0.0));
  for (std::size_t bi = 0; bi < nb; ++bi) {
    for (std::size_t gi = 0; gi < ng; ++gi) {
      double s = 0.0;
      for (std::size_t rep = 0; rep < nr; ++rep) s += samples[(bi * ng + gi) * nr + rep];
      const double mean = s / static_cast<double>(nr);
      double ss = 0.0;
      for (std::size_t rep = 0; rep < nr; ++rep) {
        const double d = samples[(bi * ng + gi) * nr + rep] - mean;
        ss += d * d;
      }
      diagram.mean_hhi[bi][gi] = mean;
      diagram.stderr_hhi[bi][gi] =
          nr > 1 ? std::sqrt(ss / static_cast<double>(nr - 1) / static_cast<double>(nr)) : 0.0;
    }
  }
  return diagram;
}

namespace detail {

/// Crossings of one diagram row with `level`, interpolated linearly in
/// (log gamma, HHI). Cells at gamma <= 0 (the prepended gamma=0 column)
/// are skipped; interpolation starts at the first positive gamma.
inline std::vector<double> row_crossings(const PhaseDiagram& d, std::size_t bi, double level) {
  const auto& gamma = d.grid.gamma_values;
  const auto& mean = d.mean_hhi[bi];
  std::vector<double> out;
  std::size_t start = 0;
  while (start < gamma.size() && !(gamma[start] > 0)) ++start;
  for (std::size_t gi = start; gi < gamma.size(); ++gi) {
    const double a = mean[gi] - level;
    if (a == 0.0) {
      out.push_back(gamma[gi]);
      continue;
    }
    if (gi + 1 >= gamma.size()) break;
    const double b = mean[gi + 1] - level;
    if (a * b < 0.0) {
      const double t = a / (a - b);
      out.push_back(std::pow(
          10.0, std::log10(gamma[gi]) + t * (std::log10(gamma[gi + 1]) - std::log10(gamma[gi]))));
    }
  }
  return out;
}

}  // namespace detail

/// Row-wise extraction of the HHI = level locus. Rows whose mean HHI never
/// crosses the level emit nothing.
inline TippingContour tipping_contour(const PhaseDiagram& diagram, double level = 0.5) {
  TippingContour contour;
  for (std::size_t bi = 0; bi < diagram.grid.beta_values.size(); ++bi)
    for (double g : detail::row_crossings(diagram, bi, level))
      contour.points.emplace_back(diagram.grid.beta_values[bi], g);
  return contour;
}

/// Ratio of the crossing gamma at the largest beta row to the crossing
/// gamma at the smallest beta row (first crossing of each). Throws when
/// either boundary row never crosses the level — at beta = 0 the over-fit
/// penalty is inert and concentration never collapses, so the default
/// diagram has no crossing there.
inline double beta_sensitivity(const PhaseDiagram& diagram, double level = 0.5) {
  if (diagram.mean_hhi.empty()) throw std::invalid_argument("beta_sensitivity: empty diagram");
  auto first = detail::row_crossings(diagram, 0, level);
  auto last = detail::row_crossings(diagram, diagram.grid.beta_values.size() - 1, level);
  if (first.empty() || last.empty())
    throw std::runtime_error("beta_sensitivity: no tipping crossing in a boundary beta row");
  return last.front() / first.front();
}

inline void write_phase_csv(const PhaseDiagram& d, std::ostream& os) {
  os << "beta,gamma,mean_hhi,stderr_hhi,replicates\n";
  for (std::size_t bi = 0; bi < d.grid.beta_values.size(); ++bi)
    for (std::size_t gi = 0; gi < d.grid.gamma_values.size(); ++gi)
      os << csv::format_double(d.grid.beta_values[bi]) << ','
         << csv::format_double(d.grid.gamma_values[gi]) << ','
         << csv::format_double(d.mean_hhi[bi][gi]) << ','
         << csv::format_double(d.stderr_hhi[bi][gi]) << ',' << d.grid.replicates << '\n';
}

inline void write_contour_csv(const TippingContour& c, std::ostream& os) {
  os << "beta,gamma_star\n";
  for (const auto& [beta, gamma] : c.points)
    os << csv::format_double(beta) << ',' << csv::format_double(gamma) << '\n';
}

}  // namespace benchtopo

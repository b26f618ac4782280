#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "benchtopo/rng.hpp"

namespace benchtopo {

/// How non-selected over-fit debts relax each step.
///
/// Subtractive (O <- max(0, O - delta)) is the default: with multiplicative
/// decay the leader's accumulated debt vanishes within a few dozen steps of
/// losing attention, the incumbent recaptures the field, and entry never
/// breaks concentration at these parameter ranges. The subtractive
/// law reproduces the pluralism regime (steady-state HHI < 0.2 at
/// beta=0.02, gamma=1e-3). Multiplicative stays available for sensitivity
/// analysis.
enum class DebtDecay { Subtractive, Multiplicative };

struct SimConfig {
  double matthew_alpha = 1.5;          // attachment exponent, > 0
  double overfit_beta = 0.0;           // reuse penalty, >= 0
  double entry_gamma = 0.0;            // new-benchmark probability, [0, 1]
  double decay_delta = 0.1;            // debt decay, [0, 1)
  std::uint64_t steps = 10000;
  std::size_t initial_benchmarks = 1;
  std::uint64_t seed = 0;
  DebtDecay debt_decay = DebtDecay::Subtractive;

  void validate() const {
    if (!(matthew_alpha > 0)) throw std::invalid_argument("matthew_alpha must be > 0");
    if (!(overfit_beta >= 0)) throw std::invalid_argument("overfit_beta must be >= 0");
    if (!(entry_gamma >= 0 && entry_gamma <= 1))
      throw std::invalid_argument("entry_gamma must be in [0, 1]");
    if (!(decay_delta >= 0 && decay_delta < 1))
      throw std::invalid_argument("decay_delta must be in [0, 1)");
    if (steps < 1) throw std::invalid_argument("steps must be >= 1");
    if (initial_benchmarks < 1) throw std::invalid_argument("initial_benchmarks must be >= 1");
  }
};

/// Per-benchmark authority and over-fit debt, A_i >= 1, O_i >= 0.
struct SimState {
  std::vector<double> authority;
  std::vector<double> debt;
  std::uint64_t step = 0;
};

struct SelectionDistribution {
  std::vector<double> probabilities;
};

/// Incumbent choice probabilities
///   P_i = A_i^alpha * exp(-beta * O_i) / sum_j A_j^alpha * exp(-beta * O_j),
/// computed as normalized exp(log-weight - max log-weight) so arbitrarily
/// large debts or authorities cannot overflow.
inline SelectionDistribution selection_probabilities(const SimState& state, double matthew_alpha,
                                                     double overfit_beta) {
  const std::size_t n = state.authority.size();
  if (n == 0) throw std::invalid_argument("selection_probabilities: empty state");
  SelectionDistribution dist;
  dist.probabilities.resize(n);
  double max_lw = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    double lw = matthew_alpha * std::log(state.authority[i]) - overfit_beta * state.debt[i];
    dist.probabilities[i] = lw;
    max_lw = std::max(max_lw, lw);
  }
  double z = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    dist.probabilities[i] = std::exp(dist.probabilities[i] - max_lw);
    z += dist.probabilities[i];
  }
  for (auto& p : dist.probabilities) p /= z;
#ifndef NDEBUG
  double s = 0.0;
  for (double p : dist.probabilities) s += p;
  assert(std::abs(s - 1.0) <= 1e-12);
#endif
  return dist;
}

namespace detail {
inline void decay_debt(double& debt, const SimConfig& config) {
  if (config.debt_decay == DebtDecay::Subtractive)
    debt = std::max(0.0, debt - config.decay_delta);
  else
    debt *= (1.0 - config.decay_delta);
}
}  // namespace detail

/// One evaluator arrival. With probability gamma a fresh benchmark enters
/// (A=1, O=0, skipping increment and decay on its birth step); otherwise an
/// incumbent is sampled from selection_probabilities and gets A+1, O+1.
/// Every debt not incremented this step decays. Draws come from the
/// counter stream at the current step index, so a step is replayable in
/// isolation. Returns the selected incumbent's index, or nullopt for an
/// entry event.
inline std::optional<std::size_t> step(SimState& state, const SimConfig& config,
                                       const CounterRng& rng) {
  const std::uint64_t t = state.step;
  if (rng.uniform(t, 0) < config.entry_gamma) {
    for (auto& o : state.debt) detail::decay_debt(o, config);
    state.authority.push_back(1.0);
    state.debt.push_back(0.0);
    ++state.step;
    return std::nullopt;
  }
  auto dist = selection_probabilities(state, config.matthew_alpha, config.overfit_beta);
  const double r = rng.uniform(t, 1);
  double acc = 0.0;
  std::size_t pick = state.authority.size() - 1;
  for (std::size_t i = 0; i < dist.probabilities.size(); ++i) {
    acc += dist.probabilities[i];
    if (r < acc) {
      pick = i;
      break;
    }
  }
  state.authority[pick] += 1.0;
  for (std::size_t i = 0; i < state.debt.size(); ++i) {
    if (i == pick)
      state.debt[i] += 1.0;
    else
      detail::decay_debt(state.debt[i], config);
  }
  ++state.step;
  return pick;
}

struct Trajectory {
  std::vector<double> hhi_per_step;          // one value per step, in (0, 1]
  std::vector<std::size_t> population_per_step;
  SimState final_state;
};

/// Run the model for config.steps steps from initial_benchmarks incumbents
/// (each A=1, O=0), recording HHI of the authority vector after every
/// step. Identical (config, seed) gives bit-identical output. HHI is
/// maintained incrementally from the running sums of A and A^2; both stay
/// integer-valued, so the update is exact.
inline Trajectory run(const SimConfig& config) {
  config.validate();
  CounterRng rng(config.seed);
  Trajectory traj;
  traj.hhi_per_step.reserve(config.steps);
  traj.population_per_step.reserve(config.steps);
  SimState& state = traj.final_state;
  state.authority.assign(config.initial_benchmarks, 1.0);
  state.debt.assign(config.initial_benchmarks, 0.0);
  double sum_a = static_cast<double>(config.initial_benchmarks);
  double sum_a2 = static_cast<double>(config.initial_benchmarks);
  for (std::uint64_t t = 0; t < config.steps; ++t) {
    auto selected = step(state, config, rng);
    sum_a += 1.0;
    if (selected) {
      const double a_old = state.authority[*selected] - 1.0;
      sum_a2 += 2.0 * a_old + 1.0;  // (a+1)^2 - a^2
    } else {
      sum_a2 += 1.0;
    }
    traj.hhi_per_step.push_back(sum_a2 / (sum_a * sum_a));
    traj.population_per_step.push_back(state.authority.size());
  }
  return traj;
}

/// Mean of the last ceil(tail_fraction * N) recorded HHI values.
inline double steady_state_hhi(const Trajectory& traj, double tail_fraction = 0.1) {
  if (traj.hhi_per_step.empty()) throw std::invalid_argument("steady_state_hhi: empty trajectory");
  if (!(tail_fraction > 0 && tail_fraction <= 1))
    throw std::invalid_argument("steady_state_hhi: tail_fraction must be in (0, 1]");
  const std::size_t n = traj.hhi_per_step.size();
  std::size_t m = static_cast<std::size_t>(
      std::ceil(tail_fraction * static_cast<double>(n)));
  m = std::clamp<std::size_t>(m, 1, n);
  double s = 0.0;
  for (std::size_t i = n - m; i < n; ++i) s += traj.hhi_per_step[i];
  return s / static_cast<double>(m);
}

}  // namespace benchtopo

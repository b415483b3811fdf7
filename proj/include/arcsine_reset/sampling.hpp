#pragma once

// Monte-Carlo engine for Brownian motion with Poissonian resetting to 0 on [0, 1].
//
// Two families of samplers live here:
//  * path simulation on a regular grid augmented with the exact reset times,
//    yielding the occupation time, last zero and argmax time in one pass;
//  * composition samplers that draw T_r and L_r from the reset times and
//    independent arcsine variables, with no discretization.
//
// Every trajectory owns a random stream keyed by (master_seed, index), so an
// ensemble is identical for any worker count or scheduling order.

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include "errors.hpp"
#include "laws.hpp"

namespace arcsine_reset {

/// Regular time grid on [0, 1]; the last step is partial when 1/dt is not an integer.
class PathGrid {
 public:
  explicit PathGrid(double dt) : dt_(dt) {
    if (!(dt > 0.0 && dt <= 1e-2)) throw DomainError("PathGrid: dt must lie in (0, 1e-2]");
    const double steps = 1.0 / dt;
    const double nearest = std::round(steps);
    n_steps_ = static_cast<std::size_t>(std::abs(steps - nearest) < 1e-9 * steps ? nearest : std::ceil(steps));
  }

  double dt() const noexcept { return dt_; }
  std::size_t n_steps() const noexcept { return n_steps_; }
  double time_at(std::size_t j) const noexcept { return j >= n_steps_ ? 1.0 : static_cast<double>(j) * dt_; }

 private:
  double dt_;
  std::size_t n_steps_;
};

struct TrajectoryFunctionals {
  double t_occupation = 0.0;  ///< T_r
  double t_last_zero = 0.0;   ///< L_r
  double t_argmax = 0.0;      ///< M_r; NaN for composition draws
  unsigned reset_count = 0;   ///< N(1)

  /// Bitwise equality, so NaN argmax fields of composition draws compare equal.
  friend bool operator==(const TrajectoryFunctionals& a, const TrajectoryFunctionals& b) noexcept {
    auto same = [](double x, double y) { return std::bit_cast<std::uint64_t>(x) == std::bit_cast<std::uint64_t>(y); };
    return same(a.t_occupation, b.t_occupation) && same(a.t_last_zero, b.t_last_zero) &&
           same(a.t_argmax, b.t_argmax) && a.reset_count == b.reset_count;
  }
};

enum class SamplingMethod { path, composition };

enum class Functional { occupation, last_zero, argmax };

struct SampleEnsemble {
  std::vector<TrajectoryFunctionals> samples;
  std::uint64_t master_seed = 0;
  std::size_t n = 0;
  std::optional<PathGrid> grid;  ///< empty for composition ensembles
  ResetModel model;
  SamplingMethod method = SamplingMethod::path;
};

using Stream = std::mt19937_64;

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t stream_key(std::uint64_t master_seed, std::uint64_t index) noexcept {
  return mix64(mix64(master_seed) ^ mix64(index ^ 0xd1b54a32d192ed03ULL));
}

inline Stream trajectory_stream(std::uint64_t master_seed, std::uint64_t index) {
  return Stream(stream_key(master_seed, index));
}

/// Event times of a rate-r Poisson process on (0, 1), from cumulative exponential gaps.
inline std::vector<double> draw_reset_times(const ResetModel& m, Stream& stream) {
  std::vector<double> times;
  if (m.rate() == 0.0) return times;
  boost::random::exponential_distribution<double> gap(m.rate());
  for (double t = gap(stream); t < 1.0; t += gap(stream)) times.push_back(t);
  return times;
}

/// sin^2(pi U / 2), the inverse-CDF transform of the arcsine law.
inline double draw_arcsine(Stream& stream) {
  const double s = std::sin(0.5 * std::numbers::pi * boost::random::uniform_01<double>{}(stream));
  return s * s;
}

/// One node of a simulated path. At a reset node `left_value` is the value just
/// before the reset and `value` is 0; elsewhere the two coincide.
struct PathNode {
  double time = 0.0;
  double left_value = 0.0;
  double value = 0.0;
  bool reset = false;
};

struct SampledPath {
  std::vector<PathNode> nodes;
  unsigned reset_count = 0;
};

/// Simulates one path into `out`, reusing its storage.
///
/// Reset times are drawn first, then Gaussian increments of variance equal to
/// the gap between consecutive nodes of the merged grid.
inline void build_path(const ResetModel& m, const PathGrid& g, Stream& stream, SampledPath& out) {
  const std::vector<double> resets = draw_reset_times(m, stream);
  boost::random::normal_distribution<double> gauss;
  out.nodes.clear();
  out.nodes.reserve(g.n_steps() + resets.size() + 1);
  out.reset_count = static_cast<unsigned>(resets.size());
  out.nodes.push_back({0.0, 0.0, 0.0, false});

  double x = 0.0;
  double t_prev = 0.0;
  std::size_t next_reset = 0;
  for (std::size_t j = 1; j <= g.n_steps(); ++j) {
    const double t = g.time_at(j);
    while (next_reset < resets.size() && resets[next_reset] < t) {
      const double tau = resets[next_reset++];
      const double left = x + std::sqrt(tau - t_prev) * gauss(stream);
      out.nodes.push_back({tau, left, 0.0, true});
      x = 0.0;
      t_prev = tau;
    }
    x += std::sqrt(t - t_prev) * gauss(stream);
    out.nodes.push_back({t, x, x, false});
    t_prev = t;
  }
}

/// Occupation time, last zero and argmax of a sampled path in a single pass.
///
/// Occupation: each interval counts in full when its left node value is >= 0.
/// Zeros: reset nodes, nodes with value exactly 0, and linearly interpolated
/// sign changes between consecutive nodes. Argmax ties go to the earliest node.
inline TrajectoryFunctionals extract_functionals(const SampledPath& path) {
  TrajectoryFunctionals f;
  f.reset_count = path.reset_count;
  const auto& nodes = path.nodes;
  if (nodes.empty()) return f;
  double occupation = 0.0;
  double last_zero = 0.0;
  double best = -std::numeric_limits<double>::infinity();
  double argmax = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const PathNode& node = nodes[i];
    if (node.reset || node.value == 0.0 || node.left_value == 0.0) last_zero = node.time;
    if (node.left_value > best) {
      best = node.left_value;
      argmax = node.time;
    }
    if (node.value > best) {
      best = node.value;
      argmax = node.time;
    }
    if (i + 1 == nodes.size()) break;
    const PathNode& next = nodes[i + 1];
    const double span = next.time - node.time;
    if (node.value >= 0.0) occupation += span;
    const double a = node.value;
    const double b = next.left_value;
    if ((a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0)) {
      last_zero = std::max(last_zero, node.time + span * a / (a - b));
    }
  }
  f.t_occupation = std::min(occupation, 1.0);
  f.t_last_zero = last_zero;
  f.t_argmax = argmax;
  return f;
}

inline TrajectoryFunctionals simulate_trajectory(const ResetModel& m, const PathGrid& g, std::uint64_t index,
                                                 std::uint64_t master_seed) {
  Stream stream = trajectory_stream(master_seed, index);
  SampledPath path;
  build_path(m, g, stream, path);
  return extract_functionals(path);
}

struct CompositionDraw {
  double occupation = 0.0;
  double last_zero = 0.0;
  unsigned reset_count = 0;
};

/// Draws T_r and L_r from one realization of the reset times.
///
/// T = sum_i (tau_{i+1} - tau_i) A_i over the k+1 inter-reset intervals and
/// L = tau_k + (1 - tau_k) A', with A_i, A' iid arcsine.
inline CompositionDraw sample_composition(const ResetModel& m, Stream& stream) {
  const std::vector<double> resets = draw_reset_times(m, stream);
  CompositionDraw d;
  d.reset_count = static_cast<unsigned>(resets.size());
  double start = 0.0;
  for (double tau : resets) {
    d.occupation += (tau - start) * draw_arcsine(stream);
    start = tau;
  }
  d.occupation += (1.0 - start) * draw_arcsine(stream);
  d.last_zero = start + (1.0 - start) * draw_arcsine(stream);
  return d;
}

inline double sample_T_composition(const ResetModel& m, Stream& stream) {
  const std::vector<double> resets = draw_reset_times(m, stream);
  double total = 0.0;
  double start = 0.0;
  for (double tau : resets) {
    total += (tau - start) * draw_arcsine(stream);
    start = tau;
  }
  return total + (1.0 - start) * draw_arcsine(stream);
}

inline double sample_L_composition(const ResetModel& m, Stream& stream) {
  const std::vector<double> resets = draw_reset_times(m, stream);
  const double last = resets.empty() ? 0.0 : resets.back();
  return last + (1.0 - last) * draw_arcsine(stream);
}

inline constexpr std::uint64_t kDefaultStepBudget = 20'000'000'000ULL;

struct EnsembleOptions {
  unsigned workers = 0;  ///< 0 selects std::thread::hardware_concurrency()
  std::uint64_t step_budget = kDefaultStepBudget;
};

namespace detail {

inline unsigned resolve_workers(unsigned requested, std::size_t n) {
  unsigned w = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(w, std::max<std::size_t>(n, 1)));
}

// Runs body(index, worker_state) for every index in [0, n) across `workers` threads.
template <class State, class Body>
void parallel_for_indices(std::size_t n, unsigned workers, Body body) {
  constexpr std::size_t chunk = 64;
  std::atomic<std::size_t> cursor{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    State state{};
    try {
      for (;;) {
        const std::size_t begin = cursor.fetch_add(chunk);
        if (begin >= n) break;
        const std::size_t end = std::min(n, begin + chunk);
        for (std::size_t i = begin; i < end; ++i) body(i, state);
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      cursor.store(n);
    }
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace detail

/// Simulates n paths; sample i depends only on (master_seed, i).
inline SampleEnsemble run_ensemble(const ResetModel& m, const PathGrid& g, std::size_t n, std::uint64_t master_seed,
                                   const EnsembleOptions& opts = {}) {
  if (n == 0) throw DomainError("run_ensemble: n must be >= 1");
  const std::uint64_t steps = static_cast<std::uint64_t>(g.n_steps());
  if (n > opts.step_budget / steps) {
    throw BudgetExceeded("run_ensemble: n * n_steps = " + std::to_string(n) + " * " + std::to_string(steps) +
                         " exceeds the step budget of " + std::to_string(opts.step_budget));
  }
  SampleEnsemble ens{std::vector<TrajectoryFunctionals>(n), master_seed, n, g, m, SamplingMethod::path};
  detail::parallel_for_indices<SampledPath>(n, detail::resolve_workers(opts.workers, n),
                                            [&](std::size_t i, SampledPath& path) {
                                              Stream stream = trajectory_stream(master_seed, i);
                                              build_path(m, g, stream, path);
                                              ens.samples[i] = extract_functionals(path);
                                            });
  return ens;
}

/// Composition draws of (T_r, L_r); t_argmax is NaN.
inline SampleEnsemble run_composition_ensemble(const ResetModel& m, std::size_t n, std::uint64_t master_seed,
                                               const EnsembleOptions& opts = {}) {
  if (n == 0) throw DomainError("run_composition_ensemble: n must be >= 1");
  SampleEnsemble ens{std::vector<TrajectoryFunctionals>(n), master_seed, n, std::nullopt, m,
                     SamplingMethod::composition};
  struct NoState {};
  detail::parallel_for_indices<NoState>(n, detail::resolve_workers(opts.workers, n), [&](std::size_t i, NoState&) {
    Stream stream = trajectory_stream(master_seed, i);
    const CompositionDraw d = sample_composition(m, stream);
    ens.samples[i] = {d.occupation, d.last_zero, std::numeric_limits<double>::quiet_NaN(), d.reset_count};
  });
  return ens;
}

inline std::vector<double> column(const SampleEnsemble& ens, Functional which) {
  std::vector<double> out;
  out.reserve(ens.samples.size());
  for (const auto& s : ens.samples) {
    switch (which) {
      case Functional::occupation: out.push_back(s.t_occupation); break;
      case Functional::last_zero: out.push_back(s.t_last_zero); break;
      case Functional::argmax: out.push_back(s.t_argmax); break;
    }
  }
  return out;
}

/// Occupation times of the trajectories that saw exactly k resets.
inline std::vector<double> occupation_given_resets(const SampleEnsemble& ens, unsigned k) {
  std::vector<double> out;
  for (const auto& s : ens.samples) {
    if (s.reset_count == k) out.push_back(s.t_occupation);
  }
  return out;
}

}  // namespace arcsine_reset

#pragma once

#include "parafee/model.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace parafee {

/// Largest set the exact makespan solver accepts.
inline constexpr std::size_t kExactMakespanCap = 12;
/// Largest number of candidate subsets schedule_opt will enumerate.
inline constexpr std::size_t kOptCandidateCap = std::size_t{1} << 12;

struct Placement {
  std::size_t core = 0;
  std::int64_t start = 0;
  std::int64_t finish = 0;
};

struct ScheduleMetrics {
  std::int64_t makespan = 0;
  std::int64_t total_compute = 0;
  Rational revenue = 0;
  std::set<std::string> included;
  std::set<std::string> dropped;
};

/// Precedence DAG plus core assignment. `precedence` holds index pairs into
/// `txs` (parent, child); `placement[i]` belongs to `txs[i]`.
struct Schedule {
  std::vector<Transaction> txs;
  std::vector<std::pair<std::size_t, std::size_t>> precedence;
  std::vector<Placement> placement;
  std::vector<Transaction> dropped;
  std::int64_t makespan = 0;
  std::int64_t total_compute = 0;
  Rational revenue = 0;

  ScheduleMetrics metrics() const;
  /// Recomputes makespan, total_compute and revenue from placements.
  void refresh_metrics();
  bool contains(const std::string& tx_id) const;
};

/// v(S): minimal makespan of a conflict-respecting schedule on n cores.
std::int64_t makespan_exact(std::span<const Transaction> txs, std::int64_t n_cores);

struct ExactSolution {
  std::int64_t makespan = 0;
  std::vector<std::int64_t> starts;  // parallel to the input
};

/// Exact solver with an optional cutoff: returns nullopt when no schedule
/// finishes within `cutoff`.
std::optional<ExactSolution> solve_makespan(std::span<const Transaction> txs, std::int64_t n_cores,
                                            std::optional<std::int64_t> cutoff = std::nullopt);

/// Lower bound on v(S) from per-object serial chains, total compute / n and
/// the longest single transaction.
std::int64_t makespan_lower_bound(std::span<const Transaction> txs, std::int64_t n_cores);

/// List schedule of `order` (indices into txs); no block limit.
std::int64_t makespan_greedy(std::span<const Transaction> txs, std::int64_t n_cores,
                             std::span<const std::size_t> order);

/// Insertion procedure shared by GREEDY and RANDOM: each transaction gets a
/// precedence edge from every earlier included conflicting transaction and is
/// list-scheduled at its earliest start; violators of the block limit are
/// dropped and the insertion continues.
Schedule schedule_in_order(std::span<const Transaction> ordered, const MachineConfig& cfg);

Schedule schedule_greedy(std::span<const Transaction> txs, const MachineConfig& cfg);
Schedule schedule_random(std::span<const Transaction> txs, const MachineConfig& cfg,
                         std::uint64_t seed);
Schedule schedule_opt(std::span<const Transaction> txs, const MachineConfig& cfg);

/// Builds a schedule of exactly `txs` at the given start times.
Schedule schedule_from_starts(std::span<const Transaction> txs, std::span<const std::int64_t> starts,
                              std::int64_t n_cores);

/// Gas-price-descending order, ties by id.
std::vector<Transaction> fee_order(std::span<const Transaction> txs);

/// Seeded uniform permutation of the id-sorted input.
std::vector<Transaction> seeded_permutation(std::span<const Transaction> txs, std::uint64_t seed);

enum class Policy { Greedy, Random, Opt };

std::string to_string(Policy policy);
Policy parse_policy(std::string_view text);

std::vector<std::uint64_t> default_seeds(std::size_t count = 64);

/// revenue(policy) / revenue(OPT). RANDOM averages over `seeds`.
Rational alpha_ratio(Policy policy, std::span<const Transaction> txs, const MachineConfig& cfg,
                     std::span<const std::uint64_t> seeds = {});

struct WorstCaseInstance {
  std::vector<Transaction> txs;
  MachineConfig cfg;
  /// Compute units per nominal unit; revenues divided by `scale` are in the
  /// nominal units of G and Tmax.
  std::int64_t scale = 1;
  Rational bound;  // (G - Tmax) / (G * min(n, O))
};

/// Revenue worst case for GREEDY: a serial high-priced chain on o1, an
/// epsilon-sized blocker declaring every object, and low-priced Tmax-sized
/// fillers per object.
WorstCaseInstance gen_greedy_worstcase(std::int64_t G, std::int64_t t_max, std::int64_t n_cores,
                                       std::int64_t objects, const Rational& eps);

/// Independent replay of a schedule's intervals; empty result means valid.
ValidationResult validate_schedule(const Schedule& schedule, const MachineConfig& cfg);

}  // namespace parafee

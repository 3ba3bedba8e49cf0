#include "parafee/scheduling.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <random>
#include <tuple>

namespace parafee {

namespace {

using Mask = std::uint32_t;

std::vector<Mask> conflict_masks(std::span<const Transaction> txs) {
  std::vector<Mask> masks(txs.size(), 0);
  for (std::size_t i = 0; i < txs.size(); ++i) {
    for (std::size_t j = i + 1; j < txs.size(); ++j) {
      if (conflicts(txs[i].reads, txs[i].writes, txs[j].reads, txs[j].writes)) {
        masks[i] |= Mask{1} << j;
        masks[j] |= Mask{1} << i;
      }
    }
  }
  return masks;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

// Depth-first branch and bound over permutations whose start times are
// non-decreasing. Some optimal schedule is reproduced by placing its jobs in
// start order at their earliest feasible time, and in that order every job
// starts no earlier than its predecessor, so the restriction loses nothing.
// With non-decreasing starts a job's earliest start is
//   max(last start, finish of every placed conflicting job, n-th largest finish)
// because all placed jobs have already started.
class ExactSolver {
 public:
  ExactSolver(std::span<const Transaction> txs, std::int64_t n_cores)
      : k_(txs.size()), n_(n_cores), t_(k_), conflict_(conflict_masks(txs)), twin_(k_, -1),
        finish_(k_, -1), start_(k_, 0), rem_lb_(std::size_t{1} << k_, -1) {
    for (std::size_t i = 0; i < k_; ++i) t_[i] = txs[i].t;
    // Access-identical jobs are interchangeable; place them in index order.
    for (std::size_t j = 0; j < k_; ++j) {
      for (std::size_t i = j; i-- > 0;) {
        if (txs[i].t == txs[j].t && txs[i].reads == txs[j].reads && txs[i].writes == txs[j].writes) {
          twin_[j] = static_cast<int>(i);
          break;
        }
      }
    }
    std::map<ObjectId, std::pair<Mask, Mask>> access;  // writers, readers
    for (std::size_t i = 0; i < k_; ++i) {
      for (const auto& o : txs[i].writes) access[o].first |= Mask{1} << i;
      for (const auto& o : txs[i].reads) {
        if (!txs[i].writes.contains(o)) access[o].second |= Mask{1} << i;
      }
    }
    for (const auto& [o, wr] : access) {
      if (wr.first != 0) objects_.push_back(wr);
    }
  }

  std::int64_t lower_bound(Mask mask) {
    auto& memo = rem_lb_[mask];
    if (memo >= 0) return memo;
    std::int64_t total = 0;
    std::int64_t longest = 0;
    for (std::size_t i = 0; i < k_; ++i) {
      if (mask & (Mask{1} << i)) {
        total += t_[i];
        longest = std::max(longest, t_[i]);
      }
    }
    std::int64_t lb = std::max(longest, ceil_div(total, n_));
    for (const auto& [writers, readers] : objects_) {
      std::int64_t chain = 0;
      std::int64_t reader = 0;
      for (std::size_t i = 0; i < k_; ++i) {
        const Mask bit = Mask{1} << i;
        if (!(mask & bit)) continue;
        if (writers & bit) chain += t_[i];
        if (readers & bit) reader = std::max(reader, t_[i]);
      }
      if (chain > 0) lb = std::max(lb, chain + reader);
    }
    memo = lb;
    return lb;
  }

  std::optional<ExactSolution> solve(std::optional<std::int64_t> cutoff,
                                     std::optional<ExactSolution> incumbent) {
    if (k_ == 0) return ExactSolution{0, {}};
    best_ = std::numeric_limits<std::int64_t>::max();
    found_ = false;
    if (incumbent && (!cutoff || incumbent->makespan <= *cutoff)) {
      best_ = incumbent->makespan;
      best_starts_ = incumbent->starts;
      found_ = true;
    } else if (cutoff) {
      best_ = *cutoff + 1;
    }
    full_ = k_ == 32 ? ~Mask{0} : ((Mask{1} << k_) - 1);
    root_lb_ = lower_bound(full_);
    if (best_ > root_lb_) dfs(0, 0, 0);
    if (!found_) return std::nullopt;
    return ExactSolution{best_, best_starts_};
  }

 private:
  void dfs(Mask placed, std::int64_t s_last, std::int64_t max_finish) {
    if (best_ == root_lb_ && found_) return;
    if (placed == full_) {
      if (max_finish < best_) {
        best_ = max_finish;
        best_starts_ = start_;
        found_ = true;
      }
      return;
    }
    std::vector<std::int64_t> running;
    for (std::size_t i = 0; i < k_; ++i) {
      if ((placed & (Mask{1} << i)) && finish_[i] > s_last) running.push_back(finish_[i]);
    }
    std::int64_t cap_time = s_last;
    if (static_cast<std::int64_t>(running.size()) >= n_) {
      std::nth_element(running.begin(), running.begin() + (n_ - 1), running.end(), std::greater<>());
      cap_time = std::max(cap_time, running[static_cast<std::size_t>(n_ - 1)]);
    }
    std::vector<std::int64_t> ready(k_, 0);
    std::vector<std::tuple<std::int64_t, std::int64_t, std::size_t>> children;
    for (std::size_t j = 0; j < k_; ++j) {
      const Mask bit = Mask{1} << j;
      if (placed & bit) continue;
      for (std::size_t i = 0; i < k_; ++i) {
        if ((placed & (Mask{1} << i)) && (conflict_[j] & (Mask{1} << i))) {
          ready[j] = std::max(ready[j], finish_[i]);
        }
      }
      if (twin_[j] >= 0 && !(placed & (Mask{1} << twin_[j]))) continue;
      children.emplace_back(std::max({s_last, cap_time, ready[j]}), -t_[j], j);
    }
    std::sort(children.begin(), children.end());
    for (const auto& [start, neg_t, j] : children) {
      const std::int64_t fin = start + t_[j];
      const Mask next = placed | (Mask{1} << j);
      const Mask rest = full_ & ~next;
      std::int64_t lb = std::max(max_finish, fin);
      if (rest != 0) {
        lb = std::max(lb, start + lower_bound(rest));
        std::int64_t work = 0;
        for (std::size_t i = 0; i < k_; ++i) {
          const Mask bit = Mask{1} << i;
          if (next & bit) {
            const std::int64_t f = (i == j) ? fin : finish_[i];
            work += std::max<std::int64_t>(0, f - start);
          } else {
            work += t_[i];
            std::int64_t r = std::max(start, ready[i]);
            if (conflict_[j] & bit) r = std::max(r, fin);
            lb = std::max(lb, r + t_[i]);
          }
        }
        lb = std::max(lb, start + ceil_div(work, n_));
      }
      if (lb >= best_) continue;
      finish_[j] = fin;
      start_[j] = start;
      dfs(next, start, std::max(max_finish, fin));
      finish_[j] = -1;
      if (best_ == root_lb_ && found_) return;
    }
  }

  std::size_t k_;
  std::int64_t n_;
  std::vector<std::int64_t> t_;
  std::vector<Mask> conflict_;
  std::vector<int> twin_;
  std::vector<std::pair<Mask, Mask>> objects_;
  std::vector<std::int64_t> finish_;
  std::vector<std::int64_t> start_;
  std::vector<std::int64_t> rem_lb_;
  Mask full_ = 0;
  std::int64_t root_lb_ = 0;
  std::int64_t best_ = 0;
  std::vector<std::int64_t> best_starts_;
  bool found_ = false;
};

struct ListOutcome {
  std::vector<bool> included;
  std::vector<Placement> placement;
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // indices into the input order
};

ListOutcome list_schedule(std::span<const Transaction> ordered, std::int64_t n_cores,
                          std::optional<std::int64_t> limit, LimitMode mode) {
  const std::size_t k = ordered.size();
  ListOutcome out;
  out.included.assign(k, false);
  out.placement.assign(k, Placement{});
  std::vector<std::vector<std::pair<std::int64_t, std::int64_t>>> cores(
      static_cast<std::size_t>(n_cores));
  std::int64_t total = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const auto& tx = ordered[i];
    std::int64_t ready = 0;
    std::vector<std::size_t> parents;
    for (std::size_t j = 0; j < i; ++j) {
      if (!out.included[j]) continue;
      const auto& other = ordered[j];
      if (conflicts(tx.reads, tx.writes, other.reads, other.writes)) {
        ready = std::max(ready, out.placement[j].finish);
        parents.push_back(j);
      }
    }
    std::vector<std::int64_t> candidates{ready};
    for (const auto& core : cores) {
      for (const auto& [s, f] : core) {
        if (f > ready) candidates.push_back(f);
      }
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    std::int64_t start = -1;
    std::size_t chosen = 0;
    for (const auto s : candidates) {
      for (std::size_t c = 0; c < cores.size(); ++c) {
        const bool free = std::none_of(cores[c].begin(), cores[c].end(), [&](const auto& iv) {
          return iv.first < s + tx.t && s < iv.second;
        });
        if (free) {
          start = s;
          chosen = c;
          break;
        }
      }
      if (start >= 0) break;
    }
    const std::int64_t finish = start + tx.t;
    if (limit) {
      const bool over = mode == LimitMode::Makespan ? finish > *limit : total + tx.t > *limit;
      if (over) continue;
    }
    out.included[i] = true;
    out.placement[i] = Placement{chosen, start, finish};
    cores[chosen].emplace_back(start, finish);
    total += tx.t;
    for (const auto p : parents) out.edges.emplace_back(p, i);
  }
  return out;
}

void check_exact_cap(std::size_t size) {
  if (size > kExactMakespanCap) {
    throw CapExceeded("instance too large for exact solver (" + std::to_string(size) + " > " +
                      std::to_string(kExactMakespanCap) + " transactions)");
  }
}

void check_cores(std::int64_t n_cores) {
  if (n_cores < 1) throw Error("n_cores must be at least 1");
}

}  // namespace

ScheduleMetrics Schedule::metrics() const {
  ScheduleMetrics m;
  m.makespan = makespan;
  m.total_compute = total_compute;
  m.revenue = revenue;
  for (const auto& tx : txs) m.included.insert(tx.id);
  for (const auto& tx : dropped) m.dropped.insert(tx.id);
  return m;
}

void Schedule::refresh_metrics() {
  makespan = 0;
  total_compute = 0;
  revenue = 0;
  for (std::size_t i = 0; i < txs.size(); ++i) {
    if (i < placement.size()) makespan = std::max(makespan, placement[i].finish);
    total_compute += txs[i].t;
    revenue += txs[i].g * txs[i].t;
  }
}

bool Schedule::contains(const std::string& tx_id) const {
  return std::any_of(txs.begin(), txs.end(), [&](const Transaction& tx) { return tx.id == tx_id; });
}

std::int64_t makespan_lower_bound(std::span<const Transaction> txs, std::int64_t n_cores) {
  check_cores(n_cores);
  if (txs.empty()) return 0;
  std::int64_t total = 0;
  std::int64_t longest = 0;
  std::map<ObjectId, std::pair<std::int64_t, std::int64_t>> chains;  // writer sum, max reader
  for (const auto& tx : txs) {
    total += tx.t;
    longest = std::max(longest, tx.t);
    for (const auto& o : tx.writes) chains[o].first += tx.t;
    for (const auto& o : tx.reads) {
      if (!tx.writes.contains(o)) chains[o].second = std::max(chains[o].second, tx.t);
    }
  }
  std::int64_t lb = std::max(longest, ceil_div(total, n_cores));
  for (const auto& [o, c] : chains) {
    if (c.first > 0) lb = std::max(lb, c.first + c.second);
  }
  return lb;
}

std::optional<ExactSolution> solve_makespan(std::span<const Transaction> txs, std::int64_t n_cores,
                                            std::optional<std::int64_t> cutoff) {
  check_cores(n_cores);
  check_exact_cap(txs.size());
  if (txs.empty()) return ExactSolution{0, {}};
  if (cutoff && makespan_lower_bound(txs, n_cores) > *cutoff) return std::nullopt;
  // Incumbent: list schedule in fee order.
  std::vector<std::size_t> order(txs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (txs[a].t != txs[b].t) return txs[a].t > txs[b].t;
    return txs[a].id < txs[b].id;
  });
  std::vector<Transaction> ordered;
  ordered.reserve(order.size());
  for (const auto i : order) ordered.push_back(txs[i]);
  const auto listed = list_schedule(ordered, n_cores, std::nullopt, LimitMode::Makespan);
  ExactSolution incumbent;
  incumbent.starts.assign(txs.size(), 0);
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    incumbent.starts[order[pos]] = listed.placement[pos].start;
    incumbent.makespan = std::max(incumbent.makespan, listed.placement[pos].finish);
  }
  ExactSolver solver(txs, n_cores);
  return solver.solve(cutoff, incumbent);
}

std::int64_t makespan_exact(std::span<const Transaction> txs, std::int64_t n_cores) {
  return solve_makespan(txs, n_cores)->makespan;
}

std::int64_t makespan_greedy(std::span<const Transaction> txs, std::int64_t n_cores,
                             std::span<const std::size_t> order) {
  check_cores(n_cores);
  if (order.size() != txs.size()) throw Error("order is not a permutation of the transaction set");
  std::vector<bool> seen(txs.size(), false);
  std::vector<Transaction> ordered;
  for (const auto i : order) {
    if (i >= txs.size() || seen[i]) throw Error("order is not a permutation of the transaction set");
    seen[i] = true;
    ordered.push_back(txs[i]);
  }
  const auto out = list_schedule(ordered, n_cores, std::nullopt, LimitMode::Makespan);
  std::int64_t ms = 0;
  for (const auto& p : out.placement) ms = std::max(ms, p.finish);
  return ms;
}

Schedule schedule_in_order(std::span<const Transaction> ordered, const MachineConfig& cfg) {
  check_cores(cfg.n_cores);
  const auto out = list_schedule(ordered, cfg.n_cores, cfg.block_limit, cfg.limit_mode);
  Schedule schedule;
  std::vector<std::size_t> position(ordered.size(), 0);
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    if (out.included[i]) {
      position[i] = schedule.txs.size();
      schedule.txs.push_back(ordered[i]);
      schedule.placement.push_back(out.placement[i]);
    } else {
      schedule.dropped.push_back(ordered[i]);
    }
  }
  for (const auto& [p, c] : out.edges) schedule.precedence.emplace_back(position[p], position[c]);
  schedule.refresh_metrics();
  return schedule;
}

std::vector<Transaction> fee_order(std::span<const Transaction> txs) {
  std::vector<Transaction> ordered(txs.begin(), txs.end());
  std::sort(ordered.begin(), ordered.end(), [](const Transaction& a, const Transaction& b) {
    if (a.g != b.g) return a.g > b.g;
    return a.id < b.id;
  });
  return ordered;
}

Schedule schedule_greedy(std::span<const Transaction> txs, const MachineConfig& cfg) {
  return schedule_in_order(fee_order(txs), cfg);
}

std::vector<Transaction> seeded_permutation(std::span<const Transaction> txs, std::uint64_t seed) {
  std::vector<Transaction> ordered(txs.begin(), txs.end());
  std::sort(ordered.begin(), ordered.end(),
            [](const Transaction& a, const Transaction& b) { return a.id < b.id; });
  // Fisher-Yates on raw mt19937_64 output with rejection sampling; the
  // standard distributions are not specified bit-exactly across libraries.
  std::mt19937_64 rng(seed);
  for (std::size_t i = ordered.size(); i > 1; --i) {
    const std::uint64_t bound = i;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t draw = rng();
    while (draw >= limit) draw = rng();
    std::swap(ordered[i - 1], ordered[draw % bound]);
  }
  return ordered;
}

Schedule schedule_random(std::span<const Transaction> txs, const MachineConfig& cfg,
                         std::uint64_t seed) {
  return schedule_in_order(seeded_permutation(txs, seed), cfg);
}

Schedule schedule_from_starts(std::span<const Transaction> txs, std::span<const std::int64_t> starts,
                              std::int64_t n_cores) {
  check_cores(n_cores);
  if (starts.size() != txs.size()) throw Error("start times do not match transactions");
  std::vector<std::size_t> order(txs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (starts[a] != starts[b]) return starts[a] < starts[b];
    return txs[a].id < txs[b].id;
  });
  Schedule schedule;
  std::vector<std::int64_t> core_free(static_cast<std::size_t>(n_cores), 0);
  for (const auto i : order) {
    std::size_t core = core_free.size();
    for (std::size_t c = 0; c < core_free.size(); ++c) {
      if (core_free[c] <= starts[i]) {
        core = c;
        break;
      }
    }
    if (core == core_free.size()) throw Error("start times exceed core capacity");
    core_free[core] = starts[i] + txs[i].t;
    schedule.txs.push_back(txs[i]);
    schedule.placement.push_back(Placement{core, starts[i], starts[i] + txs[i].t});
  }
  for (std::size_t a = 0; a < schedule.txs.size(); ++a) {
    for (std::size_t b = a + 1; b < schedule.txs.size(); ++b) {
      const auto& x = schedule.txs[a];
      const auto& y = schedule.txs[b];
      if (conflicts(x.reads, x.writes, y.reads, y.writes)) schedule.precedence.emplace_back(a, b);
    }
  }
  schedule.refresh_metrics();
  return schedule;
}

Schedule schedule_opt(std::span<const Transaction> txs, const MachineConfig& cfg) {
  check_cores(cfg.n_cores);
  // Transactions identical up to their id are interchangeable, so a candidate
  // is a count per class; within a class the smallest ids are taken.
  using Key = std::tuple<std::int64_t, Rational, Rational, ObjectSet, ObjectSet, ObjectSet, ObjectSet,
                         std::int64_t>;
  std::map<Key, std::vector<Transaction>> grouped;
  for (const auto& tx : txs) {
    grouped[Key{tx.t, tx.g, tx.pi, tx.reads, tx.writes, tx.contingent_reads, tx.contingent_writes,
                tx.t_base}]
        .push_back(tx);
  }
  std::vector<std::vector<Transaction>> classes;
  for (auto& [key, members] : grouped) {
    std::sort(members.begin(), members.end(),
              [](const Transaction& a, const Transaction& b) { return a.id < b.id; });
    classes.push_back(std::move(members));
  }
  std::size_t candidates = 1;
  for (const auto& c : classes) {
    if (candidates > kOptCandidateCap / (c.size() + 1) + 1) {
      candidates = kOptCandidateCap + 1;
      break;
    }
    candidates *= c.size() + 1;
  }
  if (candidates > kOptCandidateCap) {
    throw CapExceeded("instance too large for exhaustive revenue search (" + std::to_string(txs.size()) +
                      " transactions)");
  }

  struct Candidate {
    Rational revenue;
    std::vector<std::size_t> counts;
  };
  std::vector<Candidate> all;
  all.reserve(candidates);
  std::vector<std::size_t> counts(classes.size(), 0);
  while (true) {
    Rational rev = 0;
    for (std::size_t c = 0; c < classes.size(); ++c) {
      rev += classes[c].front().g * classes[c].front().t * static_cast<long long>(counts[c]);
    }
    all.push_back(Candidate{rev, counts});
    std::size_t c = 0;
    while (c < classes.size() && counts[c] == classes[c].size()) counts[c++] = 0;
    if (c == classes.size()) break;
    ++counts[c];
  }
  std::stable_sort(all.begin(), all.end(),
                   [](const Candidate& a, const Candidate& b) { return a.revenue > b.revenue; });

  auto members_of = [&](const Candidate& cand) {
    std::vector<Transaction> chosen;
    for (std::size_t c = 0; c < classes.size(); ++c) {
      for (std::size_t m = 0; m < cand.counts[c]; ++m) chosen.push_back(classes[c][m]);
    }
    std::sort(chosen.begin(), chosen.end(),
              [](const Transaction& a, const Transaction& b) { return a.id < b.id; });
    return chosen;
  };

  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t end = i;
    while (end < all.size() && all[end].revenue == all[i].revenue) ++end;
    std::optional<std::tuple<std::int64_t, std::vector<std::string>, std::vector<Transaction>,
                             std::vector<std::int64_t>>>
        best;
    for (std::size_t c = i; c < end; ++c) {
      auto chosen = members_of(all[c]);
      std::optional<ExactSolution> sol;
      if (cfg.limit_mode == LimitMode::Makespan) {
        if (makespan_lower_bound(chosen, cfg.n_cores) > cfg.block_limit) continue;
        sol = solve_makespan(chosen, cfg.n_cores, cfg.block_limit);
      } else {
        std::int64_t total = 0;
        for (const auto& tx : chosen) total += tx.t;
        if (total > cfg.block_limit) continue;
        sol = solve_makespan(chosen, cfg.n_cores);
      }
      if (!sol) continue;
      std::vector<std::string> ids;
      for (const auto& tx : chosen) ids.push_back(tx.id);
      if (!best || sol->makespan < std::get<0>(*best) ||
          (sol->makespan == std::get<0>(*best) && ids < std::get<1>(*best))) {
        best.emplace(sol->makespan, std::move(ids), std::move(chosen), std::move(sol->starts));
      }
    }
    if (best) {
      auto schedule = schedule_from_starts(std::get<2>(*best), std::get<3>(*best), cfg.n_cores);
      std::set<std::string> in(std::get<1>(*best).begin(), std::get<1>(*best).end());
      for (const auto& tx : txs) {
        if (!in.contains(tx.id)) schedule.dropped.push_back(tx);
      }
      return schedule;
    }
    i = end;
  }
  throw Error("no feasible schedule found");  // unreachable: the empty set is feasible
}

std::string to_string(Policy policy) {
  switch (policy) {
    case Policy::Greedy: return "greedy";
    case Policy::Random: return "random";
    case Policy::Opt: return "opt";
  }
  return "?";
}

Policy parse_policy(std::string_view text) {
  if (text == "greedy" || text == "GREEDY") return Policy::Greedy;
  if (text == "random" || text == "RANDOM") return Policy::Random;
  if (text == "opt" || text == "OPT") return Policy::Opt;
  throw Error("unknown policy '" + std::string(text) + "'");
}

std::vector<std::uint64_t> default_seeds(std::size_t count) {
  std::vector<std::uint64_t> seeds(count);
  std::iota(seeds.begin(), seeds.end(), std::uint64_t{0});
  return seeds;
}

Rational alpha_ratio(Policy policy, std::span<const Transaction> txs, const MachineConfig& cfg,
                     std::span<const std::uint64_t> seeds) {
  const Rational opt = schedule_opt(txs, cfg).revenue;
  if (opt == 0) throw Error("ratio undefined: OPT revenue is zero");
  switch (policy) {
    case Policy::Opt: return Rational(1);
    case Policy::Greedy: return schedule_greedy(txs, cfg).revenue / opt;
    case Policy::Random: {
      std::vector<std::uint64_t> fallback;
      if (seeds.empty()) {
        fallback = default_seeds();
        seeds = fallback;
      }
      Rational sum = 0;
      for (const auto seed : seeds) sum += schedule_random(txs, cfg, seed).revenue;
      return sum / static_cast<long long>(seeds.size()) / opt;
    }
  }
  return Rational(0);
}

WorstCaseInstance gen_greedy_worstcase(std::int64_t G, std::int64_t t_max, std::int64_t n_cores,
                                       std::int64_t objects, const Rational& eps) {
  if (G < 1 || t_max < 1 || t_max > G) throw Error("worst case needs 1 <= Tmax <= G");
  if (G % t_max != 0) throw Error("Tmax must divide G");
  if (objects < 1) throw Error("worst case needs at least one object");
  check_cores(n_cores);
  if (eps <= 0 || eps >= 1) throw Error("eps must lie in (0, 1)");

  const auto scale = boost::multiprecision::denominator(eps).convert_to<std::int64_t>();
  const auto blocker_t = boost::multiprecision::numerator(eps).convert_to<std::int64_t>();
  WorstCaseInstance inst;
  inst.scale = scale;
  inst.cfg = MachineConfig{n_cores, G * scale, LimitMode::Makespan};
  inst.bound = Rational(G - t_max) / (Rational(G) * std::min(n_cores, objects));

  std::vector<ObjectId> ids;
  for (std::int64_t j = 1; j <= objects; ++j) ids.emplace_back("o" + std::to_string(j));
  const std::int64_t chain = (G - t_max) / t_max;
  for (std::int64_t i = 1; i <= chain; ++i) {
    inst.txs.push_back(Transaction::simple("s" + std::to_string(i), t_max * scale, {ids[0]}, 1 + eps));
  }
  inst.txs.push_back(
      Transaction::simple("blocker", blocker_t, ObjectSet(ids.begin(), ids.end()), Rational(1)));
  for (std::int64_t j = 1; j <= objects; ++j) {
    for (std::int64_t c = 1; c <= G / t_max; ++c) {
      inst.txs.push_back(Transaction::simple("n" + std::to_string(j) + "_" + std::to_string(c),
                                             t_max * scale, {ids[static_cast<std::size_t>(j - 1)]},
                                             1 - eps));
    }
  }
  return inst;
}

ValidationResult validate_schedule(const Schedule& schedule, const MachineConfig& cfg) {
  ValidationResult result;
  auto& v = result.violations;
  const auto& txs = schedule.txs;
  if (schedule.placement.size() != txs.size()) {
    v.emplace_back("placement count does not match transactions");
    return result;
  }
  // Acyclicity via Kahn.
  std::vector<std::size_t> indegree(txs.size(), 0);
  std::vector<std::vector<std::size_t>> children(txs.size());
  for (const auto& [p, c] : schedule.precedence) {
    if (p >= txs.size() || c >= txs.size()) {
      v.emplace_back("precedence edge references unknown transaction");
      return result;
    }
    children[p].push_back(c);
    ++indegree[c];
  }
  std::queue<std::size_t> ready;
  for (std::size_t i = 0; i < txs.size(); ++i) {
    if (indegree[i] == 0) ready.push(i);
  }
  std::size_t visited = 0;
  while (!ready.empty()) {
    const auto i = ready.front();
    ready.pop();
    ++visited;
    for (const auto c : children[i]) {
      if (--indegree[c] == 0) ready.push(c);
    }
  }
  if (visited != txs.size()) v.emplace_back("precedence is cyclic");

  std::int64_t makespan = 0;
  std::int64_t total = 0;
  Rational revenue = 0;
  for (std::size_t i = 0; i < txs.size(); ++i) {
    const auto& p = schedule.placement[i];
    if (p.start < 0) v.emplace_back(txs[i].id + " starts before time 0");
    if (p.finish - p.start != txs[i].t) v.emplace_back(txs[i].id + " interval length differs from t");
    if (p.core >= static_cast<std::size_t>(cfg.n_cores)) v.emplace_back(txs[i].id + " uses a core beyond n");
    makespan = std::max(makespan, p.finish);
    total += txs[i].t;
    revenue += txs[i].g * txs[i].t;
  }
  for (const auto& [p, c] : schedule.precedence) {
    if (p < txs.size() && c < txs.size() &&
        schedule.placement[c].start < schedule.placement[p].finish) {
      v.emplace_back(txs[c].id + " starts before parent " + txs[p].id + " finishes");
    }
  }
  for (std::size_t a = 0; a < txs.size(); ++a) {
    for (std::size_t b = a + 1; b < txs.size(); ++b) {
      const auto& pa = schedule.placement[a];
      const auto& pb = schedule.placement[b];
      const bool overlap = pa.start < pb.finish && pb.start < pa.finish;
      if (!overlap) continue;
      if (conflicts(txs[a].reads, txs[a].writes, txs[b].reads, txs[b].writes)) {
        v.emplace_back("conflicting " + txs[a].id + " and " + txs[b].id + " overlap");
      }
      if (pa.core == pb.core) v.emplace_back(txs[a].id + " and " + txs[b].id + " overlap on one core");
    }
  }
  if (makespan != schedule.makespan) v.emplace_back("cached makespan differs from replay");
  if (total != schedule.total_compute) v.emplace_back("cached total compute differs from replay");
  if (revenue != schedule.revenue) v.emplace_back("cached revenue differs from replay");
  if (cfg.limit_mode == LimitMode::Makespan && makespan > cfg.block_limit) {
    v.emplace_back("makespan exceeds block limit");
  }
  if (cfg.limit_mode == LimitMode::TotalCompute && total > cfg.block_limit) {
    v.emplace_back("total compute exceeds block limit");
  }
  return result;
}

}  // namespace parafee

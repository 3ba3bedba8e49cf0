#pragma once

#include "parafee/fees.hpp"
#include "parafee/gcm.hpp"
#include "parafee/owtfm.hpp"
#include "parafee/report.hpp"
#include "parafee/scenario.hpp"
#include "parafee/scheduling.hpp"

#include <optional>
#include <string>
#include <vector>

namespace parafee {

/// Overrides and parameters for `run`. Unset optionals fall back to the
/// scenario, then to built-in defaults.
struct RunFlags {
  std::optional<Policy> policy;
  std::optional<Mechanism> mechanism;
  std::optional<Rational> alpha;
  std::optional<Rational> gamma;
  std::optional<Rational> eta;
  std::optional<UpdateVariant> variant;
  std::optional<std::int64_t> blocks;
  std::optional<std::uint64_t> seed;
  std::string rule = "owtfm";  // risk: compute | tpm | shapley | owtfm

  ConvergenceMode mode = ConvergenceMode::SingleDim;
  ConvergenceDemand demand = ConvergenceDemand::Substitutes;
  std::int64_t G = 400;
  Rational eps = Rational(1, 10);

  std::int64_t t_max = 100;
  std::int64_t n_cores = 2;
  std::int64_t objects = 3;
  std::vector<Rational> eps_list = {Rational(1, 10), Rational(1, 100), Rational(1, 1000)};
  Rational pi_o = 5;

  std::optional<Rational> f_att;
  std::optional<Rational> f_base;

  std::string corpus_dir;
};

const std::vector<std::string>& command_names();
bool command_needs_scenario(const std::string& command);

/// Dispatches one command. `scenario` may be null for commands that do not
/// need one.
Report run(const std::string& command, const Scenario* scenario, const RunFlags& flags);

/// PARAFEE_CORPUS if set, otherwise the corpus shipped with the sources.
std::string default_corpus_dir();
/// Sorted *.json paths in `dir`.
std::vector<std::string> corpus_files(const std::string& dir);
/// Resolves a scenario argument as a path, then as a corpus entry name.
std::string resolve_scenario_path(const std::string& arg, const std::string& corpus_dir);

/// Every scenario carrying fake transactions, as an independence family.
std::vector<IndependenceInstance> independence_family(const std::vector<Scenario>& scenarios);

/// Uniform price-1 book over every object referenced by the family.
ObjectPriceBook family_book(std::span<const IndependenceInstance> family);

}  // namespace parafee

#include "parafee/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace parafee;

struct Options {
  std::string scenario;
  std::string format = "text";
  bool no_timings = false;
  std::string policy, mech, alpha, gamma, eta, variant, mode, demand, eps, pi_o, f_att, f_base;
  std::vector<std::string> eps_list;
  std::int64_t blocks = -1;
  std::int64_t seed = -1;
  std::string report_path;
};

void add_common(CLI::App* app, Options& o) {
  app->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "csv", "json"}));
  app->add_flag("--no-timings", o.no_timings, "Omit wall-clock timings");
}

std::optional<Rational> opt_rational(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return parse_rational(s);
}

RunFlags to_flags(const Options& o, const std::string& corpus, CLI::App& app) {
  RunFlags f;
  f.corpus_dir = corpus;
  if (!o.policy.empty()) f.policy = parse_policy(o.policy);
  if (!o.mech.empty()) f.mechanism = parse_mechanism(o.mech);
  f.alpha = opt_rational(o.alpha);
  f.gamma = opt_rational(o.gamma);
  f.eta = opt_rational(o.eta);
  if (!o.variant.empty()) f.variant = parse_variant(o.variant);
  if (o.blocks >= 0) f.blocks = o.blocks;
  if (o.seed >= 0) f.seed = static_cast<std::uint64_t>(o.seed);
  if (!o.mode.empty()) f.mode = parse_convergence_mode(o.mode);
  if (!o.demand.empty()) f.demand = parse_convergence_demand(o.demand);
  if (!o.eps.empty()) f.eps = parse_rational(o.eps);
  if (!o.pi_o.empty()) f.pi_o = parse_rational(o.pi_o);
  if (!o.eps_list.empty()) {
    f.eps_list.clear();
    for (const auto& e : o.eps_list) f.eps_list.push_back(parse_rational(e));
  }
  f.f_att = opt_rational(o.f_att);
  f.f_base = opt_rational(o.f_base);
  (void)app;
  return f;
}

int verify_report(const std::string& path, const std::string& corpus) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "error: cannot open report '" << path << "'\n";
    return 2;
  }
  const auto report = nlohmann::json::parse(in, nullptr, false);
  if (report.is_discarded() || !report.contains("scenario") || !report["scenario"].is_string()) {
    std::cerr << "error: '" << path << "' is not a report\n";
    return 2;
  }
  const auto name = report["scenario"].get<std::string>();
  for (const auto& file : corpus_files(corpus)) {
    const auto sc = load_scenario(file);
    if (sc.name != name) continue;
    if (report_hash_matches(report, sc.hash)) {
      std::cout << "report hash matches corpus scenario '" << name << "'\n";
      return 0;
    }
    std::cout << "report hash does not match corpus scenario '" << name << "' (expected " << sc.hash << ")\n";
    return 1;
  }
  std::cout << "no corpus scenario named '" << name << "'\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parallel-execution fee mechanism toolkit"};
  app.require_subcommand(1);
  std::string corpus = default_corpus_dir();
  app.add_option("--corpus", corpus, "Corpus directory (default: $PARAFEE_CORPUS or the shipped corpus)");

  Options o;
  std::int64_t G = 400, t_max = 100, n_cores = 2, objects = 3;
  std::string rule = "owtfm";
  std::map<std::string, CLI::App*> subs;
  const std::map<std::string, std::string> help{
      {"schedule", "Build a block schedule"},
      {"gas", "Gas assignment by a GCM"},
      {"shill", "Exhaustive shill search over the scenario's pools"},
      {"risk", "Fee quotes, user risk and scheduler risk"},
      {"prior-table", "Expected fee per scheduler prior and risk division"},
      {"owtfm-sim", "Multi-block OW-TFM price simulation"},
      {"convergence", "Single vs multi-dimensional price convergence"},
      {"bounds", "Worst-case GREEDY ratio, shill alpha bound, spam witness"},
      {"check-all", "Run every invariant suite across the corpus"},
  };
  for (const auto& name : command_names()) {
    auto* sub = app.add_subcommand(name, help.at(name));
    subs[name] = sub;
    add_common(sub, o);
    if (command_needs_scenario(name)) {
      sub->add_option("scenario", o.scenario, "Scenario file or corpus entry name")->required();
    }
  }
  subs["schedule"]->add_option("--policy", o.policy, "greedy|random|opt");
  subs["schedule"]->add_option("--seed", o.seed, "Seed for the random policy");
  subs["gas"]->add_option("--mech", o.mech, "shapley|tpm|compute");
  subs["shill"]->add_option("--mech", o.mech, "Override every pool's mechanism");
  for (auto* s : {subs["risk"], subs["owtfm-sim"]}) {
    s->add_option("--alpha", o.alpha, "Risk division alpha");
    s->add_option("--gamma", o.gamma, "Retention ratio gamma");
  }
  subs["risk"]->add_option("--rule", rule, "compute|tpm|shapley|owtfm");
  subs["prior-table"]->add_option("--f-att", o.f_att, "Attainable fee for the numeric table");
  subs["prior-table"]->add_option("--f-base", o.f_base, "Base fee for the numeric table");
  for (auto* s : {subs["owtfm-sim"], subs["convergence"]}) {
    s->add_option("--blocks", o.blocks, "Number of blocks");
    s->add_option("--eta", o.eta, "Responsiveness eta");
    s->add_option("--variant", o.variant, "exp|linear");
  }
  subs["owtfm-sim"]->add_option("--policy", o.policy, "greedy|random|opt");
  subs["owtfm-sim"]->add_option("--seed", o.seed, "Seed for the random policy");
  subs["convergence"]->add_option("--mode", o.mode, "single|multi");
  subs["convergence"]->add_option("--demand", o.demand, "substitutes|at-target");
  subs["convergence"]->add_option("--G", G, "Per-resource limit");
  subs["convergence"]->add_option("--eps", o.eps, "Small transaction size");
  subs["bounds"]->add_option("--G", G, "Block limit");
  subs["bounds"]->add_option("--tmax", t_max, "Largest transaction");
  subs["bounds"]->add_option("--n", n_cores, "Cores");
  subs["bounds"]->add_option("--objects", objects, "Objects");
  subs["bounds"]->add_option("--eps", o.eps_list, "Epsilon values");
  subs["bounds"]->add_option("--eta", o.eta, "Responsiveness eta");
  subs["bounds"]->add_option("--gamma", o.gamma, "Retention ratio gamma");
  subs["bounds"]->add_option("--pi-o", o.pi_o, "Average priority on the object");
  auto* verify = app.add_subcommand("verify-report", "Check a JSON report's scenario hash against the corpus");
  verify->add_option("report", o.report_path, "Report file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (verify->parsed()) return verify_report(o.report_path, corpus);
    std::string command;
    for (const auto& [name, sub] : subs) {
      if (sub->parsed()) command = name;
    }
    auto flags = to_flags(o, corpus, app);
    flags.rule = rule;
    flags.G = G;
    flags.t_max = t_max;
    flags.n_cores = n_cores;
    flags.objects = objects;
    std::optional<Scenario> scenario;
    if (command_needs_scenario(command)) scenario = load_scenario(resolve_scenario_path(o.scenario, corpus));
    const auto report = run(command, scenario ? &*scenario : nullptr, flags);
    if (o.format == "csv") std::cout << render_csv(report);
    else if (o.format == "json") std::cout << report_json(report, !o.no_timings).dump(2) << "\n";
    else std::cout << render_text(report, !o.no_timings);
    return report.ok() ? 0 : 1;
  } catch (const ScenarioError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

#include "parafee/scenario.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace parafee {

using nlohmann::json;

namespace {

std::string join_items(const std::string& origin, const std::vector<std::string>& items) {
  std::string out = origin + ": scenario rejected";
  for (const auto& item : items) out += "\n  - " + item;
  return out;
}

// Collects every problem instead of stopping at the first.
class Reader {
 public:
  std::vector<std::string> errors;

  void fail(const std::string& path, const std::string& message) { errors.push_back(path + ": " + message); }

  bool check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) {
      fail(path, "expected an object");
      return false;
    }
    for (const auto& [key, value] : obj.items()) {
      bool known = false;
      for (const auto* a : allowed) known = known || key == a;
      if (!known) fail(path + "." + key, "unknown field");
    }
    return true;
  }

  std::optional<Rational> rational(const json& v, const std::string& path) {
    try {
      if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
      if (v.is_number()) return parse_rational(v.dump());
      if (v.is_string()) return parse_rational(v.get<std::string>());
    } catch (const Error& e) {
      fail(path, e.what());
      return std::nullopt;
    }
    fail(path, "expected a rational (integer or \"p/q\" string)");
    return std::nullopt;
  }

  std::optional<std::int64_t> integer(const json& v, const std::string& path) {
    if (v.is_number_integer()) return v.get<std::int64_t>();
    fail(path, "expected an integer");
    return std::nullopt;
  }

  std::optional<std::string> string(const json& v, const std::string& path) {
    if (v.is_string()) return v.get<std::string>();
    fail(path, "expected a string");
    return std::nullopt;
  }

  ObjectSet objects(const json& v, const std::string& path, const ObjectSet* known) {
    ObjectSet out;
    if (!v.is_array()) {
      fail(path, "expected an array of object ids");
      return out;
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
      const auto p = path + "[" + std::to_string(i) + "]";
      if (const auto s = string(v[i], p)) {
        if (known && !known->contains(ObjectId(*s))) fail(p, "unknown object '" + *s + "'");
        if (!out.insert(ObjectId(*s)).second) fail(p, "object '" + *s + "' listed twice");
      }
    }
    return out;
  }

  template <typename F>
  auto parsed(const std::string& path, F&& f) -> std::optional<decltype(f())> {
    try {
      return f();
    } catch (const Error& e) {
      fail(path, e.what());
      return std::nullopt;
    }
  }
};

std::string position_of(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

Transaction read_transaction(Reader& r, const json& v, const std::string& path, const ObjectSet& known,
                             bool& fake) {
  Transaction tx;
  fake = false;
  if (!r.check_keys(v, path, {"id", "t", "g", "pi", "reads", "writes", "contingent_reads", "contingent_writes",
                              "t_base", "rule", "fake"})) {
    return tx;
  }
  if (!v.contains("id")) r.fail(path, "missing field 'id'");
  else if (const auto s = r.string(v["id"], path + ".id")) tx.id = *s;
  if (!v.contains("t")) r.fail(path, "missing field 't'");
  else if (const auto t = r.integer(v["t"], path + ".t")) tx.t = *t;
  if (v.contains("g")) {
    if (const auto g = r.rational(v["g"], path + ".g")) tx.g = *g;
  }
  if (v.contains("pi")) {
    if (const auto pi = r.rational(v["pi"], path + ".pi")) tx.pi = *pi;
  }
  if (v.contains("reads")) tx.reads = r.objects(v["reads"], path + ".reads", &known);
  if (v.contains("writes")) tx.writes = r.objects(v["writes"], path + ".writes", &known);
  if (v.contains("contingent_reads")) {
    tx.contingent_reads = r.objects(v["contingent_reads"], path + ".contingent_reads", &known);
  }
  if (v.contains("contingent_writes")) {
    tx.contingent_writes = r.objects(v["contingent_writes"], path + ".contingent_writes", &known);
  }
  tx.t_base = tx.t;
  if (v.contains("t_base")) {
    if (const auto tb = r.integer(v["t_base"], path + ".t_base")) tx.t_base = *tb;
  }
  if (v.contains("fake")) {
    if (!v["fake"].is_boolean()) r.fail(path + ".fake", "expected a boolean");
    else fake = v["fake"].get<bool>();
  }
  return tx;
}

std::vector<WriteEffect> read_effects(Reader& r, const json& v, const std::string& path, const ObjectSet& known) {
  std::vector<WriteEffect> out;
  if (!v.is_object()) {
    r.fail(path, "expected an object mapping object ids to values");
    return out;
  }
  for (const auto& [key, value] : v.items()) {
    if (!known.contains(ObjectId(key))) r.fail(path + "." + key, "unknown object '" + key + "'");
    if (const auto n = r.integer(value, path + "." + key)) out.push_back(WriteEffect{ObjectId(key), *n});
  }
  return out;
}

ContingencyRule read_rule(Reader& r, const json& v, const std::string& path, const Transaction& tx,
                          const ObjectSet& known) {
  ContingencyRule rule = ContingencyRule::unconditional(tx);
  if (!r.check_keys(v, path, {"guard", "on_full", "on_under"})) return rule;
  if (v.contains("guard")) {
    const auto& g = v["guard"];
    const auto gp = path + ".guard";
    if (r.check_keys(g, gp, {"object", "cmp", "value"})) {
      Guard guard;
      if (!g.contains("object")) r.fail(gp, "missing field 'object'");
      else if (const auto s = r.string(g["object"], gp + ".object")) guard.object = ObjectId(*s);
      if (g.contains("cmp")) {
        if (const auto s = r.string(g["cmp"], gp + ".cmp")) {
          if (const auto c = r.parsed(gp + ".cmp", [&] { return parse_comparator(*s); })) guard.cmp = *c;
        }
      }
      if (g.contains("value")) {
        if (const auto n = r.integer(g["value"], gp + ".value")) guard.constant = *n;
      }
      rule.guard = guard;
    }
  }
  if (v.contains("on_full")) rule.on_full = read_effects(r, v["on_full"], path + ".on_full", known);
  if (v.contains("on_under")) rule.on_under = read_effects(r, v["on_under"], path + ".on_under", known);
  return rule;
}

template <typename Key>
void read_gas_expectations(Reader& r, const json& v, const std::string& path,
                           std::map<Key, std::map<std::string, Rational>>& out) {
  if (!v.is_object()) {
    r.fail(path, "expected an object keyed by mechanism");
    return;
  }
  for (const auto& [mech, table] : v.items()) {
    const auto p = path + "." + mech;
    const auto m = r.parsed(p, [&] { return parse_mechanism(mech); });
    if (!m || !table.is_object()) {
      if (m) r.fail(p, "expected an object keyed by transaction id");
      continue;
    }
    for (const auto& [id, value] : table.items()) {
      if (const auto q = r.rational(value, p + "." + id)) out[*m][id] = *q;
    }
  }
}

}  // namespace

ScenarioError::ScenarioError(std::string origin, std::vector<std::string> items)
    : Error(join_items(origin, items)), items_(std::move(items)) {}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string scenario_hash(const json& doc) { return fnv1a_hex(doc.dump()); }

std::string rational_json(const Rational& value) { return to_string(value); }

json transaction_json(const Transaction& tx) {
  auto ids = [](const ObjectSet& s) {
    json a = json::array();
    for (const auto& o : s) a.push_back(o.value);
    return a;
  };
  return json{{"id", tx.id},
              {"t", tx.t},
              {"g", rational_json(tx.g)},
              {"pi", rational_json(tx.pi)},
              {"reads", ids(tx.reads)},
              {"writes", ids(tx.writes)},
              {"contingent_reads", ids(tx.contingent_reads)},
              {"contingent_writes", ids(tx.contingent_writes)},
              {"t_base", tx.t_base}};
}

std::vector<Transaction> Scenario::honest() const {
  std::vector<Transaction> out;
  for (const auto& tx : txs) {
    if (!fake_ids.contains(tx.id)) out.push_back(tx);
  }
  return out;
}

std::vector<Transaction> Scenario::fakes() const {
  std::vector<Transaction> out;
  for (const auto& tx : txs) {
    if (fake_ids.contains(tx.id)) out.push_back(tx);
  }
  return out;
}

ObjectPriceBook Scenario::price_book() const {
  if (owtfm) return owtfm->book;
  return ObjectPriceBook::uniform(objects, Rational(machine.block_limit), Rational(1, 8),
                                  UpdateVariant::Exponential);
}

Scenario parse_scenario(const std::string& text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::string msg = e.what();
    if (const auto pos = msg.find("parse error"); pos != std::string::npos) msg = msg.substr(pos);
    throw ScenarioError(origin, {position_of(text, e.byte) + ": " + msg});
  }
  Reader r;
  Scenario sc;
  sc.hash = scenario_hash(doc);
  if (!r.check_keys(doc, "$", {"name", "objects", "transactions", "machine", "retention", "division", "prior",
                               "initial_state", "owtfm", "shill", "seeds", "expect"})) {
    throw ScenarioError(origin, r.errors);
  }
  if (doc.contains("name")) {
    if (const auto s = r.string(doc["name"], "name")) sc.name = *s;
  }
  if (doc.contains("objects")) sc.objects = r.objects(doc["objects"], "objects", nullptr);

  if (doc.contains("machine")) {
    const auto& m = doc["machine"];
    if (r.check_keys(m, "machine", {"n_cores", "block_limit", "limit_mode"})) {
      if (m.contains("n_cores")) {
        if (const auto n = r.integer(m["n_cores"], "machine.n_cores")) sc.machine.n_cores = *n;
      }
      if (m.contains("block_limit")) {
        if (const auto n = r.integer(m["block_limit"], "machine.block_limit")) sc.machine.block_limit = *n;
      }
      if (m.contains("limit_mode")) {
        if (const auto s = r.string(m["limit_mode"], "machine.limit_mode")) {
          if (const auto lm = r.parsed("machine.limit_mode", [&] { return parse_limit_mode(*s); })) {
            sc.machine.limit_mode = *lm;
          }
        }
      }
    }
  }
  for (const auto& v : validate_machine(sc.machine).violations) r.fail("machine", v);

  if (doc.contains("retention")) {
    const auto& m = doc["retention"];
    if (r.check_keys(m, "retention", {"gamma"}) && m.contains("gamma")) {
      if (const auto g = r.rational(m["gamma"], "retention.gamma")) sc.retention.gamma = *g;
    }
  }
  for (const auto& v : validate_retention(sc.retention).violations) r.fail("retention", v);

  if (doc.contains("division")) {
    const auto& d = doc["division"];
    if (d.is_string()) {
      const auto s = d.get<std::string>();
      if (s == "user-friendly") sc.division = RiskDivision::user_friendly();
      else if (s == "even-steven") sc.division = RiskDivision::even_steven();
      else if (s == "scheduler-friendly") sc.division = RiskDivision::scheduler_friendly();
      else r.fail("division", "unknown preset '" + s + "'");
    } else if (r.check_keys(d, "division", {"alpha"}) && d.contains("alpha")) {
      if (const auto a = r.rational(d["alpha"], "division.alpha")) sc.division.alpha = *a;
    }
  }
  for (const auto& v : validate_division(sc.division).violations) r.fail("division", v);

  if (doc.contains("prior")) {
    if (const auto s = r.string(doc["prior"], "prior")) {
      if (const auto p = r.parsed("prior", [&] { return parse_prior(*s); })) sc.prior = *p;
    }
  }

  if (doc.contains("transactions")) {
    const auto& list = doc["transactions"];
    if (!list.is_array()) {
      r.fail("transactions", "expected an array");
    } else {
      std::set<std::string> ids;
      for (std::size_t i = 0; i < list.size(); ++i) {
        const auto path = "transactions[" + std::to_string(i) + "]";
        bool fake = false;
        auto tx = read_transaction(r, list[i], path, sc.objects, fake);
        const auto label = path + " (" + tx.id + ")";
        if (!tx.id.empty() && !ids.insert(tx.id).second) r.fail(label, "duplicate transaction id");
        for (const auto& v : validate_transaction(tx).violations) r.fail(label, v);
        if (fake) sc.fake_ids.insert(tx.id);
        if (list[i].is_object() && list[i].contains("rule")) {
          auto rule = read_rule(r, list[i]["rule"], path + ".rule", tx, sc.objects);
          for (const auto& v : validate_rule(tx, rule).violations) r.fail(label + ".rule", v);
          sc.rules[tx.id] = std::move(rule);
        }
        sc.txs.push_back(std::move(tx));
      }
    }
  }

  if (doc.contains("initial_state")) {
    const auto& s = doc["initial_state"];
    if (!s.is_object()) {
      r.fail("initial_state", "expected an object");
    } else {
      for (const auto& [key, value] : s.items()) {
        if (!sc.objects.contains(ObjectId(key))) r.fail("initial_state." + key, "unknown object '" + key + "'");
        if (const auto n = r.integer(value, "initial_state." + key)) sc.initial_state.values[ObjectId(key)] = *n;
      }
    }
  }

  if (doc.contains("owtfm")) {
    const auto& o = doc["owtfm"];
    if (r.check_keys(o, "owtfm", {"eta", "variant", "prices", "targets", "default_price", "default_target",
                                  "blocks", "basis"})) {
      OwtfmSettings settings;
      auto& book = settings.book;
      Rational default_price = 1;
      Rational default_target = Rational(sc.machine.block_limit);
      if (o.contains("eta")) {
        if (const auto e = r.rational(o["eta"], "owtfm.eta")) book.eta = *e;
      }
      if (o.contains("variant")) {
        if (const auto s = r.string(o["variant"], "owtfm.variant")) {
          if (const auto v = r.parsed("owtfm.variant", [&] { return parse_variant(*s); })) book.variant = *v;
        }
      }
      if (o.contains("default_price")) {
        if (const auto p = r.rational(o["default_price"], "owtfm.default_price")) default_price = *p;
      }
      if (o.contains("default_target")) {
        if (const auto p = r.rational(o["default_target"], "owtfm.default_target")) default_target = *p;
      }
      for (const auto& obj : sc.objects) {
        book.prices[obj] = default_price;
        book.targets[obj] = default_target;
      }
      for (const char* field : {"prices", "targets"}) {
        if (!o.contains(field)) continue;
        const auto path = std::string("owtfm.") + field;
        if (!o[field].is_object()) {
          r.fail(path, "expected an object");
          continue;
        }
        for (const auto& [key, value] : o[field].items()) {
          if (!sc.objects.contains(ObjectId(key))) r.fail(path + "." + key, "unknown object '" + key + "'");
          if (const auto q = r.rational(value, path + "." + key)) {
            (std::string(field) == "prices" ? book.prices : book.targets)[ObjectId(key)] = *q;
          }
        }
      }
      if (o.contains("blocks")) {
        if (const auto n = r.integer(o["blocks"], "owtfm.blocks")) settings.blocks = *n;
      }
      if (o.contains("basis")) {
        if (const auto s = r.string(o["basis"], "owtfm.basis")) {
          if (*s == "declared") settings.basis = UtilizationBasis::Declared;
          else if (*s == "realized") settings.basis = UtilizationBasis::Realized;
          else r.fail("owtfm.basis", "unknown basis '" + *s + "'");
        }
      }
      for (const auto& v : validate_book(book).violations) r.fail("owtfm", v);
      sc.owtfm = settings;
    }
  }

  if (doc.contains("shill")) {
    const auto& list = doc["shill"];
    if (!list.is_array()) {
      r.fail("shill", "expected an array");
    } else {
      for (std::size_t i = 0; i < list.size(); ++i) {
        const auto path = "shill[" + std::to_string(i) + "]";
        const auto& e = list[i];
        if (!r.check_keys(e, path, {"attacker", "victim", "mechanism", "kmax", "pool", "expect_profit"})) continue;
        ShillPool pool;
        if (e.contains("attacker")) {
          if (const auto s = r.string(e["attacker"], path + ".attacker")) {
            if (const auto a = r.parsed(path + ".attacker", [&] { return parse_attacker(*s); })) pool.attacker = *a;
          }
        }
        if (e.contains("victim")) {
          if (const auto s = r.string(e["victim"], path + ".victim")) pool.victim = *s;
        }
        if (pool.attacker == Attacker::User) {
          bool found = false;
          for (const auto& tx : sc.txs) found = found || (tx.id == pool.victim && !sc.fake_ids.contains(tx.id));
          if (!found) r.fail(path + ".victim", "victim must name an honest transaction");
        }
        if (e.contains("mechanism")) {
          if (const auto s = r.string(e["mechanism"], path + ".mechanism")) {
            pool.mechanism = r.parsed(path + ".mechanism", [&] { return parse_mechanism(*s); });
          }
        }
        if (e.contains("kmax")) {
          if (const auto n = r.integer(e["kmax"], path + ".kmax")) {
            if (*n < 1) r.fail(path + ".kmax", "kmax must be at least 1");
            else pool.kmax = static_cast<std::size_t>(*n);
          }
        }
        if (e.contains("pool")) {
          const auto& p = e["pool"];
          if (!p.is_array()) {
            r.fail(path + ".pool", "expected an array");
          } else {
            for (std::size_t j = 0; j < p.size(); ++j) {
              const auto pp = path + ".pool[" + std::to_string(j) + "]";
              if (p[j].is_string()) {
                const auto id = p[j].get<std::string>();
                bool found = false;
                for (const auto& tx : sc.txs) {
                  if (tx.id == id) {
                    pool.pool.push_back(tx);
                    found = true;
                  }
                }
                if (!found) r.fail(pp, "unknown transaction '" + id + "'");
              } else {
                bool fake = false;
                auto tx = read_transaction(r, p[j], pp, sc.objects, fake);
                for (const auto& v : validate_transaction(tx).violations) r.fail(pp, v);
                pool.pool.push_back(std::move(tx));
              }
            }
          }
        } else {
          pool.pool = sc.fakes();
        }
        if (e.contains("expect_profit")) pool.expect_profit = r.rational(e["expect_profit"], path + ".expect_profit");
        sc.shill_pools.push_back(std::move(pool));
      }
    }
  }

  if (doc.contains("seeds")) {
    const auto& s = doc["seeds"];
    if (!s.is_array()) {
      r.fail("seeds", "expected an array");
    } else {
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i].is_number_unsigned()) sc.seeds.push_back(s[i].get<std::uint64_t>());
        else r.fail("seeds[" + std::to_string(i) + "]", "expected a non-negative integer");
      }
    }
  }

  if (doc.contains("expect")) {
    const auto& e = doc["expect"];
    if (r.check_keys(e, "expect", {"gas_honest", "gas_all", "schedules", "greedy_ratio"})) {
      if (e.contains("gas_honest")) read_gas_expectations(r, e["gas_honest"], "expect.gas_honest", sc.expect.gas_honest);
      if (e.contains("gas_all")) read_gas_expectations(r, e["gas_all"], "expect.gas_all", sc.expect.gas_all);
      if (e.contains("greedy_ratio")) sc.expect.greedy_ratio = r.rational(e["greedy_ratio"], "expect.greedy_ratio");
      if (e.contains("schedules")) {
        const auto& s = e["schedules"];
        if (!s.is_object()) {
          r.fail("expect.schedules", "expected an object keyed by policy");
        } else {
          for (const auto& [name, body] : s.items()) {
            const auto p = "expect.schedules." + name;
            const auto policy = r.parsed(p, [&] { return parse_policy(name); });
            if (!policy || !r.check_keys(body, p, {"makespan", "revenue", "dropped"})) continue;
            ScheduleExpectation se;
            if (body.contains("makespan")) se.makespan = r.integer(body["makespan"], p + ".makespan");
            if (body.contains("revenue")) se.revenue = r.rational(body["revenue"], p + ".revenue");
            if (body.contains("dropped")) {
              std::vector<std::string> ids;
              if (!body["dropped"].is_array()) r.fail(p + ".dropped", "expected an array");
              else
                for (const auto& d : body["dropped"]) {
                  if (const auto id = r.string(d, p + ".dropped")) ids.push_back(*id);
                }
              se.dropped = ids;
            }
            sc.expect.schedules[*policy] = se;
          }
        }
      }
    }
  }

  if (!r.errors.empty()) throw ScenarioError(origin, r.errors);
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError(path, {"cannot open file"});
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path);
}

}  // namespace parafee

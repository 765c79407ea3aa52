#include "repair_miner/concrete.hpp"

#include "repair_miner/errors.hpp"
#include "text.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace repair_miner {

using nlohmann::ordered_json;

void ConcreteSpace::validate(double tolerance) const {
  if (n_place == 0 || n_ast == 0)
    throw DomainError("concrete space needs n_place >= 1 and n_ast >= 1");
  const auto &o = operators;
  for (double p : {o.insert, o.remove, o.swap})
    if (!(p >= 0.0 && p <= 1.0))
      throw DomainError("operator probability outside [0, 1]");
  if (std::abs(o.sum() - 1.0) > tolerance)
    throw DomainError("operator probabilities sum to " + text::number(o.sum()) +
                      ", expected 1");
}

std::string ConcreteAction::to_string() const {
  switch (kind) {
  case Kind::insert:
    return "insert(" + std::to_string(ast) + ", " + std::to_string(other) + ")";
  case Kind::remove:
    return "delete(" + std::to_string(ast) + ")";
  case Kind::swap:
    return "swap(" + std::to_string(ast) + ", " + std::to_string(other) + ")";
  }
  return {};
}

double concrete_action_probability(const ConcreteSpace &space,
                                   const ConcreteAction &a) {
  auto check = [&](std::size_t index, std::size_t bound, const char *what) {
    if (index >= bound)
      throw DomainError(a.to_string() + ": " + what + " index " +
                        std::to_string(index) + " out of range [0, " +
                        std::to_string(bound) + ")");
  };
  const auto n_ast = static_cast<double>(space.n_ast);
  switch (a.kind) {
  case ConcreteAction::Kind::insert:
    check(a.ast, space.n_ast, "node");
    check(a.other, space.n_place, "place");
    return space.operators.insert / (static_cast<double>(space.n_place) * n_ast);
  case ConcreteAction::Kind::remove:
    check(a.ast, space.n_ast, "node");
    return space.operators.remove / n_ast;
  case ConcreteAction::Kind::swap:
    check(a.ast, space.n_ast, "node");
    check(a.other, space.n_ast, "node");
    return space.operators.swap / (n_ast * n_ast);
  }
  return 0.0;
}

double fix_probability(const ConcreteSpace &space, const ConcreteFix &fix) {
  if (fix.empty())
    throw EmptyShape("a concrete fix needs at least one action");
  auto sorted = fix;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();

  double log_p = std::lgamma(static_cast<double>(n) + 1.0);
  double p = 1.0;
  std::uint64_t coefficient = 1, m = 0;
  bool zero = false;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && sorted[j] == sorted[i])
      ++j;
    const std::size_t e = j - i;
    const double q = concrete_action_probability(space, sorted[i]);
    if (q == 0.0)
      zero = true;
    if (n <= 20) {
      for (std::uint64_t k = 1; k <= e; ++k)
        coefficient = coefficient * ++m / k;
      p *= std::pow(q, static_cast<double>(e));
    } else if (!zero) {
      log_p += static_cast<double>(e) * std::log(q) -
               std::lgamma(static_cast<double>(e) + 1.0);
    }
    i = j;
  }
  if (zero)
    return 0.0;
  const double result =
      n <= 20 ? static_cast<double>(coefficient) * p : std::exp(log_p);
  return std::min(result, 1.0);
}

Attempts logical_time(const ConcreteSpace &space, const ConcreteFix &fix) {
  return median_attempts(fix_probability(space, fix));
}

std::vector<Attempts>
operator_sweep(const ConcreteSpace &space, const ConcreteFix &fix,
               const std::vector<OperatorProbabilities> &distributions) {
  std::vector<Attempts> out;
  for (std::size_t i = 0; i < distributions.size(); ++i) {
    auto s = space;
    s.operators = distributions[i];
    try {
      s.validate();
    } catch (const DomainError &e) {
      throw DomainError("operator row " + std::to_string(i + 1) + ": " + e.what());
    }
    out.push_back(logical_time(s, fix));
  }
  return out;
}

ConcreteSpace fault_localization_factor(const ConcreteSpace &space,
                                        std::size_t surviving_places) {
  if (surviving_places == 0 || surviving_places > space.n_place)
    throw DomainError("surviving places must be in [1, " +
                      std::to_string(space.n_place) + "], got " +
                      std::to_string(surviving_places));
  auto s = space;
  s.n_place = surviving_places;
  return s;
}

Attempts multi_action_time(const ConcreteSpace &space, const ConcreteFix &fix) {
  if (fix.size() < 2)
    throw DomainError("multi-action fixes have at least two actions");
  return logical_time(space, fix);
}

// ---------------------------------------------------------------------------
// Scenarios

Scenario parse_scenario(std::string_view text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error &e) {
    throw SchemaError(std::string("malformed scenario: ") + e.what());
  }
  Scenario s;
  try {
    s.name = j.value("name", "");
    s.n_place = j.at("n_place").get<std::size_t>();
    s.n_ast = j.at("n_ast").get<std::size_t>();
    for (const auto &row : j.at("operators"))
      s.operators.push_back({row.at("p_insert").get<double>(),
                             row.at("p_delete").get<double>(),
                             row.at("p_swap").get<double>()});
    for (const auto &a : j.at("fix")) {
      const auto op = a.at("op").get<std::string>();
      const auto ast = a.at("ast").get<std::size_t>();
      if (op == "insert")
        s.fix.push_back(ConcreteAction::insert(ast, a.at("place").get<std::size_t>()));
      else if (op == "delete")
        s.fix.push_back(ConcreteAction::remove(ast));
      else if (op == "swap")
        s.fix.push_back(ConcreteAction::swap(ast, a.at("ast2").get<std::size_t>()));
      else
        throw SchemaError("unknown fix operation '" + op + "'");
    }
    if (j.contains("surviving_places"))
      s.surviving_places = j.at("surviving_places").get<std::size_t>();
  } catch (const nlohmann::json::exception &e) {
    throw SchemaError(std::string("invalid scenario: ") + e.what());
  }
  if (s.operators.empty())
    throw SchemaError("scenario has no operator rows");
  if (s.fix.empty())
    throw SchemaError("scenario has an empty fix");

  ConcreteSpace space{s.n_place, s.n_ast, {}};
  for (std::size_t i = 0; i < s.operators.size(); ++i) {
    space.operators = s.operators[i];
    try {
      space.validate();
    } catch (const DomainError &e) {
      throw DomainError("operator row " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  if (s.surviving_places)
    space = fault_localization_factor(space, *s.surviving_places);
  for (const auto &a : s.fix)
    concrete_action_probability(space, a); // bounds check
  return s;
}

Scenario load_scenario(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw Error("cannot read scenario file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::vector<SweepRow> simulate(const Scenario &scenario) {
  ConcreteSpace base{scenario.n_place, scenario.n_ast, {}};
  if (scenario.surviving_places)
    base = fault_localization_factor(base, *scenario.surviving_places);
  std::vector<SweepRow> rows;
  for (const auto &ops : scenario.operators) {
    auto space = base;
    space.operators = ops;
    const double p = fix_probability(space, scenario.fix);
    rows.push_back({ops, space.n_place, p, median_attempts(p)});
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow> &rows) {
  std::string out = text::csv_row(
      {"p_insert", "p_delete", "p_swap", "n_place", "probability", "logical_time"});
  for (const auto &r : rows)
    out += text::csv_row({text::number(r.operators.insert),
                          text::number(r.operators.remove),
                          text::number(r.operators.swap), std::to_string(r.n_place),
                          text::number(r.p),
                          r.time.is_infinite() ? "inf" : r.time.to_string()});
  return out;
}

std::string sweep_markdown(const std::vector<SweepRow> &rows) {
  std::string out = "| p_insert | p_delete | p_swap | Logical time |\n"
                    "|---:|---:|---:|---:|\n";
  for (const auto &r : rows)
    out += "| " + text::fixed(r.operators.insert, 2) + " | " +
           text::fixed(r.operators.remove, 2) + " | " +
           text::fixed(r.operators.swap, 2) + " | " + r.time.to_string() + " |\n";
  return out;
}

std::string sweep_json(const Scenario &scenario, const std::vector<SweepRow> &rows) {
  ordered_json j;
  if (!scenario.name.empty())
    j["name"] = scenario.name;
  j["n_place"] = scenario.n_place;
  j["n_ast"] = scenario.n_ast;
  if (scenario.surviving_places)
    j["surviving_places"] = *scenario.surviving_places;
  auto fix = ordered_json::array();
  for (const auto &a : scenario.fix)
    fix.push_back(a.to_string());
  j["fix"] = std::move(fix);
  auto out = ordered_json::array();
  for (const auto &r : rows) {
    ordered_json row{{"p_insert", r.operators.insert},
                     {"p_delete", r.operators.remove},
                     {"p_swap", r.operators.swap},
                     {"n_place", r.n_place},
                     {"probability", r.p}};
    row["logical_time"] =
        r.time.is_infinite() ? ordered_json("infinite") : ordered_json(r.time.value());
    out.push_back(std::move(row));
  }
  j["rows"] = std::move(out);
  return j.dump(2) + "\n";
}

} // namespace repair_miner

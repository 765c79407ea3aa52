#include "repair_miner/crossval.hpp"

#include "repair_miner/errors.hpp"
#include "text.hpp"

#include <json.hpp>
#include <omp.h>

#include <algorithm>
#include <exception>
#include <set>

namespace repair_miner {

using nlohmann::ordered_json;

std::vector<std::string> projects_of(const std::vector<Transaction> &corpus) {
  std::set<std::string> names;
  for (const auto &t : corpus)
    names.insert(t.project);
  return {names.begin(), names.end()};
}

Split split(const std::vector<Transaction> &corpus,
            const std::string &held_out_project) {
  const auto projects = projects_of(corpus);
  if (projects.size() < 2)
    throw SplitError("cross-validation needs at least two projects, corpus has " +
                     std::to_string(projects.size()));
  if (!std::binary_search(projects.begin(), projects.end(), held_out_project))
    throw SplitError("project '" + held_out_project + "' is not in the corpus");
  Split s{{"training", {}}, {held_out_project, {}}};
  for (const auto &t : corpus)
    (t.project == held_out_project ? s.evaluation : s.training)
        .members.push_back(&t);
  return s;
}

std::optional<Attempts> median_of(std::vector<Attempts> values) {
  if (values.empty())
    return std::nullopt;
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>((values.size() - 1) / 2);
  std::nth_element(values.begin(), mid, values.end());
  return *mid;
}

namespace {

void check_spec(const CrossValSpec &spec) {
  if (!spec.corpus || !spec.taxonomy)
    throw Error("cross-validation spec needs a corpus and a taxonomy");
  for (auto s : spec.sizes)
    if (s == 0)
      throw DomainError("shape sizes must be positive");
  for (const auto &t : *spec.corpus)
    if (!t.mined())
      throw NotMined("transaction " + t.project + "/" + t.id +
                     " has not been mined");
  if (projects_of(*spec.corpus).size() < 2)
    throw SplitError("cross-validation needs at least two projects");
}

struct Row {
  std::vector<Cell> cells;
  std::size_t training_size = 0;
};

Row evaluate_project(const CrossValSpec &spec, const FeatureSpace &space,
                     const std::string &project) {
  const auto parts = split(*spec.corpus, project);
  const auto training = apply_heuristic(parts.training, spec.heuristic);

  std::optional<RepairModel> model;
  if (spec.heuristic.kind == Provenance::Kind::eqp) {
    model = eqp(space);
  } else {
    try {
      model = train(training, space, *spec.taxonomy, spec.heuristic);
    } catch (const TrainingError &) {
      // every evaluated transaction of this row counts as a failure
    }
  }

  Row row;
  row.training_size = training.size();
  row.cells.resize(spec.sizes.size());
  std::vector<std::vector<Attempts>> values(spec.sizes.size());
  for (const auto *t : parts.evaluation.members) {
    if (spec.evaluation == EvaluationFilter::bfp &&
        !matches_bfp(t->message, spec.keywords))
      continue;
    const auto n = t->change_count();
    for (std::size_t c = 0; c < spec.sizes.size(); ++c) {
      if (spec.sizes[c] != n)
        continue;
      if (!model) {
        ++row.cells[c].failures;
        continue;
      }
      try {
        const auto shape = extract_shape(*t, space, *spec.taxonomy);
        values[c].push_back(repairability(shape, *model).median);
      } catch (const Error &) {
        ++row.cells[c].failures;
      }
    }
  }
  for (std::size_t c = 0; c < spec.sizes.size(); ++c) {
    row.cells[c].evaluated = values[c].size();
    row.cells[c].median = median_of(std::move(values[c]));
  }
  return row;
}

RepairabilityTable assemble(const CrossValSpec &spec,
                            std::vector<std::string> projects,
                            std::vector<Row> rows) {
  RepairabilityTable table;
  table.heuristic = spec.heuristic;
  table.model = spec.model;
  table.projects = std::move(projects);
  table.sizes = spec.sizes;
  for (auto &r : rows) {
    table.cells.push_back(std::move(r.cells));
    table.training_sizes.push_back(r.training_size);
  }
  return table;
}

} // namespace

RepairabilityTable run_crossval(const CrossValSpec &spec) {
  check_spec(spec);
  const auto space = spec.taxonomy->feature_space(spec.model);
  auto projects = projects_of(*spec.corpus);
  std::vector<Row> rows(projects.size());
  std::vector<std::exception_ptr> errors(projects.size());
  const auto n = static_cast<std::int64_t>(projects.size());
  const int threads = spec.workers > 0 ? spec.workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      rows[i] = evaluate_project(spec, space, projects[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto &e : errors)
    if (e)
      std::rethrow_exception(e);
  return assemble(spec, std::move(projects), std::move(rows));
}

RepairabilityTable run_crossval_serial(const CrossValSpec &spec) {
  check_spec(spec);
  const auto space = spec.taxonomy->feature_space(spec.model);
  auto projects = projects_of(*spec.corpus);
  std::vector<Row> rows;
  for (const auto &p : projects)
    rows.push_back(evaluate_project(spec, space, p));
  return assemble(spec, std::move(projects), std::move(rows));
}

HeuristicSeries summarize(const RepairabilityTable &table) {
  HeuristicSeries s{table.heuristic, table.sizes, {}};
  for (std::size_t c = 0; c < table.sizes.size(); ++c) {
    std::vector<Attempts> medians;
    for (const auto &row : table.cells)
      if (row[c].median)
        medians.push_back(*row[c].median);
    s.medians.push_back(median_of(std::move(medians)));
  }
  return s;
}

std::vector<HeuristicSeries>
compare_heuristics(const CrossValSpec &base,
                   const std::vector<Provenance> &heuristics) {
  if (heuristics.empty())
    throw Error("compare_heuristics needs at least one heuristic");
  std::vector<HeuristicSeries> out;
  for (const auto &h : heuristics) {
    auto spec = base;
    spec.heuristic = h;
    out.push_back(summarize(run_crossval(spec)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reports

namespace {

std::string csv_value(const std::optional<Attempts> &a) {
  if (!a)
    return "";
  return a->is_infinite() ? "inf" : std::to_string(a->value());
}

ordered_json json_value(const std::optional<Attempts> &a) {
  if (!a)
    return nullptr;
  if (a->is_infinite())
    return "infinite";
  return a->value();
}

std::string md_value(const std::optional<Attempts> &a) {
  return a ? a->to_string() : "-";
}

} // namespace

std::string table_csv(const RepairabilityTable &t) {
  std::string out = text::csv_row(
      {"heuristic", "project", "size", "median", "evaluated", "failures"});
  for (std::size_t r = 0; r < t.projects.size(); ++r)
    for (std::size_t c = 0; c < t.sizes.size(); ++c) {
      const auto &cell = t.cells[r][c];
      out += text::csv_row({t.heuristic.heading(), t.projects[r],
                            std::to_string(t.sizes[c]), csv_value(cell.median),
                            std::to_string(cell.evaluated),
                            std::to_string(cell.failures)});
    }
  return out;
}

std::string table_markdown(const RepairabilityTable &t) {
  std::string out = "| Project (" + t.heuristic.heading() + ", " +
                    std::string(to_string(t.model)) + ") |";
  std::string rule = "|---|";
  for (auto s : t.sizes) {
    out += " " + std::to_string(s) + " |";
    rule += "---:|";
  }
  out += "\n" + rule + "\n";
  for (std::size_t r = 0; r < t.projects.size(); ++r) {
    out += "| " + text::md_escape(t.projects[r]) + " |";
    for (const auto &cell : t.cells[r]) {
      if (cell.median)
        out += " **" + cell.median->to_string() + "** (" +
               std::to_string(cell.evaluated) + ") |";
      else
        out += " - (0) |";
    }
    out += "\n";
  }
  return out;
}

std::string table_json(const RepairabilityTable &t) {
  ordered_json j;
  j["heuristic"] = t.heuristic.to_string();
  j["model"] = std::string(to_string(t.model));
  j["sizes"] = t.sizes;
  auto rows = ordered_json::array();
  for (std::size_t r = 0; r < t.projects.size(); ++r) {
    auto cells = ordered_json::array();
    for (std::size_t c = 0; c < t.sizes.size(); ++c) {
      const auto &cell = t.cells[r][c];
      cells.push_back(ordered_json{{"size", t.sizes[c]},
                                   {"median", json_value(cell.median)},
                                   {"evaluated", cell.evaluated},
                                   {"failures", cell.failures}});
    }
    rows.push_back(ordered_json{{"project", t.projects[r]},
                                {"training_transactions", t.training_sizes[r]},
                                {"cells", std::move(cells)}});
  }
  j["rows"] = std::move(rows);
  return j.dump(2) + "\n";
}

std::string series_csv(const std::vector<HeuristicSeries> &series) {
  std::vector<std::string> header{"size"};
  for (const auto &s : series)
    header.push_back(s.heuristic.heading());
  std::string out = text::csv_row(header);
  if (series.empty())
    return out;
  for (std::size_t c = 0; c < series.front().sizes.size(); ++c) {
    std::vector<std::string> row{std::to_string(series.front().sizes[c])};
    for (const auto &s : series)
      row.push_back(csv_value(s.medians[c]));
    out += text::csv_row(row);
  }
  return out;
}

std::string series_markdown(const std::vector<HeuristicSeries> &series) {
  std::string out = "| Size |";
  std::string rule = "|---:|";
  for (const auto &s : series) {
    out += " " + s.heuristic.heading() + " |";
    rule += "---:|";
  }
  out += "\n" + rule + "\n";
  if (series.empty())
    return out;
  for (std::size_t c = 0; c < series.front().sizes.size(); ++c) {
    out += "| " + std::to_string(series.front().sizes[c]) + " |";
    for (const auto &s : series)
      out += " " + md_value(s.medians[c]) + " |";
    out += "\n";
  }
  return out;
}

std::string series_json(const std::vector<HeuristicSeries> &series) {
  auto j = ordered_json::array();
  for (const auto &s : series) {
    auto points = ordered_json::array();
    for (std::size_t c = 0; c < s.sizes.size(); ++c)
      points.push_back(
          ordered_json{{"size", s.sizes[c]}, {"median", json_value(s.medians[c])}});
    j.push_back(ordered_json{{"heuristic", s.heuristic.to_string()},
                             {"points", std::move(points)}});
  }
  return j.dump(2) + "\n";
}

} // namespace repair_miner

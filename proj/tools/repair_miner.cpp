// repair-miner: command-line front end.

#include "repair_miner/concrete.hpp"
#include "repair_miner/corpus.hpp"
#include "repair_miner/crossval.hpp"
#include "repair_miner/errors.hpp"
#include "repair_miner/repair_model.hpp"
#include "repair_miner/statistics.hpp"
#include "repair_miner/taxonomy.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

namespace rm = repair_miner;
using nlohmann::ordered_json;

namespace {

enum class Format { csv, md, json };

struct Config {
  std::string model = "ct";
  std::string bag = "all";
  std::string format = "json";
  std::uint64_t seed = 42;
  int workers = 0;
  std::string taxonomy;
  std::string out;
  bool verbose = false;

  Format fmt() const {
    if (format == "csv")
      return Format::csv;
    if (format == "md")
      return Format::md;
    return Format::json;
  }
};

class UsageError : public rm::Error {
public:
  using rm::Error::Error;
};

std::unique_ptr<rm::Taxonomy> load_taxonomy(const Config &c) {
  if (c.taxonomy.empty())
    return std::make_unique<rm::Taxonomy>(rm::Taxonomy::default_taxonomy());
  return std::make_unique<rm::Taxonomy>(rm::Taxonomy::load(c.taxonomy));
}

int workers(const Config &c) {
  if (const char *env = std::getenv("REPAIR_MINER_WORKERS")) {
    const std::string_view text(env);
    int w = -1;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), w);
    if (ec == std::errc() && end == text.data() + text.size() && w >= 0)
      return w;
    throw UsageError(std::string("REPAIR_MINER_WORKERS must be a non-negative "
                                 "integer, got '") + env + "'");
  }
  return c.workers;
}

void emit(const Config &c, const std::string &text) {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(c.out, std::ios::binary | std::ios::trunc);
  if (!out)
    throw rm::Error("cannot write '" + c.out + "'");
  out << text;
}

void note(const Config &c, const std::string &text) {
  if (c.verbose)
    std::cerr << text;
}

std::vector<rm::Transaction> read_input_corpus(const std::string &path) {
  if (!std::filesystem::exists(path))
    throw rm::Error("corpus file '" + path + "' does not exist");
  return rm::read_corpus(path);
}

rm::TransactionBag select_bag(const std::vector<rm::Transaction> &corpus,
                              const std::string &selector) {
  const auto p = rm::Provenance::parse(selector);
  if (p.kind == rm::Provenance::Kind::eqp)
    throw UsageError("bag 'eqp' is a training baseline, not a transaction bag");
  return rm::apply_heuristic(rm::bag_all(corpus), p);
}

rm::FrequencyTable table_for(const rm::TransactionBag &bag,
                             const rm::Taxonomy &tax, const std::string &model) {
  return rm::frequencies(bag, tax.feature_space(rm::parse_change_model(model)), tax);
}

// ---------------------------------------------------------------------------
// mine

struct MineArgs {
  std::string repo;
  std::string project;
  std::string corpus;
  std::string corpus_out;
  bool force = false;
  std::size_t top = 20;
};

void cmd_mine(const Config &c, const MineArgs &a) {
  const auto tax = load_taxonomy(c);
  std::vector<rm::Transaction> corpus;
  std::vector<std::string> warnings;
  if (!a.repo.empty()) {
    const auto project =
        a.project.empty() ? std::filesystem::path(a.repo).filename().string()
                          : a.project;
    corpus = rm::ingest_vcs(a.repo, project, {}, &warnings);
  } else if (!a.corpus.empty()) {
    corpus = read_input_corpus(a.corpus);
  } else {
    throw UsageError("mine needs --repo or --corpus");
  }

  // Already-mined records keep their cached changes unless --force.
  std::vector<rm::Transaction> pending;
  std::vector<std::size_t> where;
  for (std::size_t i = 0; i < corpus.size(); ++i)
    if (a.force || !corpus[i].mined()) {
      pending.push_back(corpus[i]);
      where.push_back(i);
    }
  const auto report = rm::mine(pending, *tax, workers(c));
  for (std::size_t i = 0; i < pending.size(); ++i)
    corpus[where[i]] = std::move(pending[i]);

  const std::string target = a.corpus_out.empty() ? a.corpus : a.corpus_out;
  if (target.empty())
    throw UsageError("mine --repo needs --corpus-out");
  rm::write_corpus(target, corpus);

  for (const auto &w : warnings)
    std::cerr << "warning: " << w << "\n";
  for (const auto &s : report.skipped)
    std::cerr << "warning: skipped " << s.project << "/" << s.transaction << " "
              << s.path << ": " << s.reason << "\n";

  std::size_t changes = 0;
  for (const auto &t : corpus)
    changes += t.change_count();
  const auto freq = table_for(rm::bag_all(corpus), *tax, c.model);

  std::string out;
  switch (c.fmt()) {
  case Format::json: {
    ordered_json j;
    j["corpus"] = target;
    j["transactions"] = corpus.size();
    j["mined_now"] = pending.size();
    j["changes"] = changes;
    j["skipped_pairs"] = report.skipped.size();
    j["dropped_operations"] = report.dropped_operations;
    j["warnings"] = warnings.size();
    auto top = ordered_json::parse(rm::frequencies_json(freq))["features"];
    ordered_json ranked = ordered_json::array();
    std::vector<std::size_t> order(freq.alpha.size());
    for (std::size_t i = 0; i < order.size(); ++i)
      order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) {
      return freq.alpha[x] > freq.alpha[y];
    });
    for (std::size_t i = 0; i < order.size() && i < a.top; ++i)
      if (freq.alpha[order[i]] > 0)
        ranked.push_back(top[order[i]]);
    j["top"] = std::move(ranked);
    out = j.dump(2) + "\n";
    break;
  }
  case Format::csv:
    out = "transactions,changes,skipped_pairs\n" + std::to_string(corpus.size()) +
          "," + std::to_string(changes) + "," +
          std::to_string(report.skipped.size()) + "\n\n" +
          rm::frequencies_csv(freq);
    break;
  case Format::md:
    out = "Transactions: " + std::to_string(corpus.size()) +
          "  \nChanges: " + std::to_string(changes) + "  \nSkipped file pairs: " +
          std::to_string(report.skipped.size()) + "\n\n" +
          rm::frequencies_markdown(freq, a.top);
    break;
  }
  emit(c, out);
  note(c, rm::frequencies_markdown(freq, a.top));
}

// ---------------------------------------------------------------------------
// slice

void cmd_slice(const Config &c, const std::string &corpus_path,
               const std::string &corpus_out) {
  const auto corpus = read_input_corpus(corpus_path);
  const auto bag = select_bag(corpus, c.bag);
  if (!corpus_out.empty()) {
    std::vector<rm::Transaction> members;
    for (const auto *t : bag.members)
      members.push_back(*t);
    rm::write_corpus(corpus_out, members);
  }
  std::string out;
  switch (c.fmt()) {
  case Format::json: {
    ordered_json j;
    j["bag"] = bag.name;
    j["size"] = bag.size();
    j["of"] = corpus.size();
    auto ids = ordered_json::array();
    for (const auto *t : bag.members)
      ids.push_back(ordered_json{{"project", t->project}, {"id", t->id}});
    j["members"] = std::move(ids);
    out = j.dump(2) + "\n";
    break;
  }
  case Format::csv:
    out = "project,id\n";
    for (const auto *t : bag.members)
      out += t->project + "," + t->id + "\n";
    break;
  case Format::md:
    out = "Bag " + bag.name + ": " + std::to_string(bag.size()) + " of " +
          std::to_string(corpus.size()) + " transactions\n\n| Project | Id |\n|---|---|\n";
    for (const auto *t : bag.members)
      out += "| " + t->project + " | " + t->id + " |\n";
    break;
  }
  emit(c, out);
}

// ---------------------------------------------------------------------------
// stats

void cmd_freq(const Config &c, const std::string &corpus_path, std::size_t top) {
  const auto tax = load_taxonomy(c);
  const auto corpus = read_input_corpus(corpus_path);
  const auto bag = select_bag(corpus, c.bag);
  const auto table = table_for(bag, *tax, c.model);
  if (!table.chi_defined())
    std::cerr << "warning: bag " << bag.name << " has no changes; chi undefined\n";
  switch (c.fmt()) {
  case Format::json:
    emit(c, rm::frequencies_json(table));
    break;
  case Format::csv:
    emit(c, rm::frequencies_csv(table));
    break;
  case Format::md:
    emit(c, rm::frequencies_markdown(table, top));
    break;
  }
  note(c, rm::frequencies_markdown(table, top));
}

void cmd_spearman(const Config &c, const std::string &corpus_path) {
  const auto tax = load_taxonomy(c);
  const auto corpus = read_input_corpus(corpus_path);
  const auto bag = select_bag(corpus, c.bag);
  const auto space = tax->feature_space(rm::parse_change_model(c.model));

  std::map<std::string, rm::TransactionBag> per_project;
  for (const auto *t : bag.members)
    per_project[t->project].members.push_back(t);
  // A shared feature list: permissive mode may add labels in some projects.
  rm::FeatureSpace shared = space;
  std::vector<rm::FrequencyTable> tables;
  std::vector<std::string> names;
  for (const auto &[name, b] : per_project) {
    tables.push_back(rm::frequencies(b, space, *tax));
    for (const auto &f : tables.back().space.features())
      shared.extend(f);
    names.push_back(name);
  }
  if (names.size() < 2)
    throw UsageError("spearman needs at least two projects in the bag");
  std::vector<std::vector<double>> vectors;
  for (const auto &t : tables) {
    std::vector<double> v(shared.size(), 0.0);
    for (std::size_t i = 0; i < t.space.size(); ++i)
      v[shared.index_of(t.space.features()[i])] = t.chi[i];
    vectors.push_back(std::move(v));
  }
  const auto m = rm::spearman_matrix(names, vectors, 0.01, workers(c));
  switch (c.fmt()) {
  case Format::json:
    emit(c, rm::spearman_json(m));
    break;
  case Format::csv:
    emit(c, rm::spearman_csv(m));
    break;
  case Format::md:
    emit(c, rm::spearman_markdown(m));
    break;
  }
  note(c, rm::spearman_markdown(m));
}

void cmd_agreement(const Config &c, const std::string &ratings_path) {
  std::ifstream in(ratings_path);
  if (!in)
    throw rm::Error("cannot read ratings file '" + ratings_path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const auto a = rm::agreement(rm::read_ratings_csv(buf.str()));
  const auto kappa = a.kappa ? std::to_string(*a.kappa) : std::string("undefined");
  switch (c.fmt()) {
  case Format::json:
    emit(c, rm::agreement_json(a));
    break;
  case Format::csv: {
    std::ostringstream s;
    s.precision(17);
    s << "p_bar,p_e,kappa\n" << a.p_bar << "," << a.p_e << ",";
    if (a.kappa)
      s << *a.kappa;
    s << "\n";
    emit(c, s.str());
    break;
  }
  case Format::md:
    emit(c, "| P̄ | P_e | κ |\n|---:|---:|---:|\n| " + std::to_string(a.p_bar) +
                " | " + std::to_string(a.p_e) + " | " + kappa + " |\n");
    break;
  }
}

// ---------------------------------------------------------------------------
// repair median

struct MedianArgs {
  std::optional<double> p;
  std::string shape;
  std::string corpus;
  std::string model_file;
  std::string model_out;
  std::uint64_t trials = 0;
};

std::vector<std::string> split_list(const std::string &s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos)
      out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

void cmd_median(const Config &c, const MedianArgs &a) {
  ordered_json j;
  if (a.p) {
    const auto n = rm::median_attempts(*a.p);
    j["p"] = *a.p;
    j["median_attempts"] =
        n.is_infinite() ? ordered_json("infinite") : ordered_json(n.value());
  } else {
    if (a.shape.empty())
      throw UsageError("repair median needs --p or --shape");
    const auto tax = load_taxonomy(c);
    std::optional<rm::RepairModel> model;
    if (!a.model_file.empty()) {
      std::ifstream in(a.model_file);
      if (!in)
        throw rm::Error("cannot read model file '" + a.model_file + "'");
      std::stringstream buf;
      buf << in.rdbuf();
      model = rm::RepairModel::from_json(buf.str());
    } else {
      const auto space = tax->feature_space(rm::parse_change_model(c.model));
      const auto prov = rm::Provenance::parse(c.bag);
      if (prov.kind == rm::Provenance::Kind::eqp) {
        model = rm::eqp(space);
      } else {
        if (a.corpus.empty())
          throw UsageError("repair median --shape needs --corpus, --model-file "
                           "or --bag eqp");
        const auto corpus = read_input_corpus(a.corpus);
        model = rm::train(rm::apply_heuristic(rm::bag_all(corpus), prov), space,
                          *tax, prov);
      }
    }
    if (!a.model_out.empty()) {
      std::ofstream out(a.model_out);
      if (!out)
        throw rm::Error("cannot write '" + a.model_out + "'");
      out << model->to_json();
    }
    const rm::RepairShape shape(split_list(a.shape, ';'));
    const auto r = rm::repairability(shape, *model);
    j["shape"] = shape.to_string();
    j["n"] = shape.n();
    j["provenance"] = model->provenance().to_string();
    j["p"] = r.p;
    j["median_attempts"] = r.median.is_infinite() ? ordered_json("infinite")
                                                  : ordered_json(r.median.value());
    if (a.trials > 0) {
      const auto mc = rm::monte_carlo_median(shape, *model, a.trials, c.seed,
                                             {10'000'000, workers(c)});
      j["monte_carlo"] = ordered_json{{"trials", mc.trials},
                                      {"seed", c.seed},
                                      {"median", mc.median},
                                      {"capped_trials", mc.capped}};
    }
  }
  switch (c.fmt()) {
  case Format::json:
    emit(c, j.dump(2) + "\n");
    break;
  case Format::csv: {
    std::string header, row;
    for (auto &[k, v] : j.items()) {
      if (v.is_object())
        continue;
      header += (header.empty() ? "" : ",") + k;
      row += (row.empty() ? "" : ",") +
             (v.is_string() ? v.get<std::string>() : v.dump());
    }
    if (j.contains("monte_carlo")) {
      header += ",monte_carlo_median";
      row += "," + j["monte_carlo"]["median"].dump();
    }
    emit(c, header + "\n" + row + "\n");
    break;
  }
  case Format::md: {
    std::string out = "| Field | Value |\n|---|---|\n";
    for (auto &[k, v] : j.items())
      out += "| " + k + " | " + (v.is_string() ? v.get<std::string>() : v.dump()) +
             " |\n";
    emit(c, out);
    break;
  }
  }
}

// ---------------------------------------------------------------------------
// crossval

struct CrossvalArgs {
  std::string corpus;
  std::string sizes = "1-8";
  std::string evaluation = "bfp";
};

std::vector<std::size_t> parse_sizes(const std::string &text) {
  std::vector<std::size_t> out;
  for (const auto &part : split_list(text, ',')) {
    const auto dash = part.find('-');
    try {
      if (dash == std::string::npos) {
        out.push_back(std::stoul(part));
      } else {
        const auto lo = std::stoul(part.substr(0, dash));
        const auto hi = std::stoul(part.substr(dash + 1));
        for (auto s = lo; s <= hi; ++s)
          out.push_back(s);
      }
    } catch (const std::logic_error &) {
      throw UsageError("invalid size list '" + text + "'");
    }
  }
  if (out.empty() || std::count(out.begin(), out.end(), 0u))
    throw UsageError("sizes must be positive integers");
  return out;
}

void cmd_crossval(const Config &c, const CrossvalArgs &a) {
  const auto tax = load_taxonomy(c);
  const auto corpus = read_input_corpus(a.corpus);
  if (rm::projects_of(corpus).size() < 2)
    throw UsageError("cross-validation needs a corpus with at least two projects");
  rm::CrossValSpec spec;
  spec.corpus = &corpus;
  spec.taxonomy = tax.get();
  spec.model = rm::parse_change_model(c.model);
  spec.sizes = parse_sizes(a.sizes);
  if (a.evaluation == "all")
    spec.evaluation = rm::EvaluationFilter::all;
  else if (a.evaluation != "bfp")
    throw UsageError("--eval must be bfp or all");
  spec.workers = workers(c);

  std::vector<rm::Provenance> heuristics;
  for (const auto &h : split_list(c.bag, ','))
    heuristics.push_back(rm::Provenance::parse(h));
  if (heuristics.empty())
    throw UsageError("--bag names no heuristic");

  if (heuristics.size() == 1) {
    spec.heuristic = heuristics.front();
    const auto table = rm::run_crossval(spec);
    switch (c.fmt()) {
    case Format::json:
      emit(c, rm::table_json(table));
      break;
    case Format::csv:
      emit(c, rm::table_csv(table));
      break;
    case Format::md:
      emit(c, rm::table_markdown(table));
      break;
    }
    note(c, rm::table_markdown(table));
    return;
  }
  const auto series = rm::compare_heuristics(spec, heuristics);
  switch (c.fmt()) {
  case Format::json:
    emit(c, rm::series_json(series));
    break;
  case Format::csv:
    emit(c, rm::series_csv(series));
    break;
  case Format::md:
    emit(c, rm::series_markdown(series));
    break;
  }
  note(c, rm::series_markdown(series));
}

// ---------------------------------------------------------------------------
// simulate

void cmd_simulate(const Config &c, const std::string &path) {
  const auto scenario = rm::load_scenario(path);
  const auto rows = rm::simulate(scenario);
  switch (c.fmt()) {
  case Format::json:
    emit(c, rm::sweep_json(scenario, rows));
    break;
  case Format::csv:
    emit(c, rm::sweep_csv(rows));
    break;
  case Format::md:
    emit(c, rm::sweep_markdown(rows));
    break;
  }
  note(c, rm::sweep_markdown(rows));
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Mine AST-level change actions and analyse repair search spaces"};
  app.name("repair-miner");
  app.require_subcommand(1);
  app.fallthrough();

  Config cfg;
  app.add_option("--model", cfg.model, "Change model")
      ->check(CLI::IsMember({"ct", "ctet", "CT", "CTET"}));
  app.add_option("--bag", cfg.bag, "Bag or heuristic: all, bfp, nsc:<n>, eqp");
  app.add_option("--format", cfg.format, "Output format")
      ->check(CLI::IsMember({"csv", "md", "json"}));
  app.add_option("--seed", cfg.seed, "Random seed");
  app.add_option("--workers", cfg.workers,
                 "Worker threads (0 = all cores; REPAIR_MINER_WORKERS overrides)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--taxonomy", cfg.taxonomy, "Taxonomy configuration file")
      ->check(CLI::ExistingFile);
  app.add_option("--out", cfg.out, "Write the report to a file");
  app.add_flag("--verbose,-v", cfg.verbose, "Human-readable tables on stderr");

  MineArgs mine_args;
  auto *mine = app.add_subcommand("mine", "Ingest and mine transactions");
  mine->add_option("--repo", mine_args.repo, "Git checkout to ingest");
  mine->add_option("--project", mine_args.project, "Project name (default: directory name)");
  mine->add_option("--corpus", mine_args.corpus, "Corpus file to mine in place");
  mine->add_option("--corpus-out", mine_args.corpus_out, "Mined corpus destination");
  mine->add_option("--top", mine_args.top, "Rows in the frequency summary");
  mine->add_flag("--force", mine_args.force, "Re-mine records that carry changes");

  std::string slice_corpus, slice_out;
  auto *slice = app.add_subcommand("slice", "Select a transaction bag");
  slice->add_option("--corpus", slice_corpus, "Mined corpus file")->required();
  slice->add_option("--corpus-out", slice_out, "Write the bag as a corpus file");

  auto *stats = app.add_subcommand("stats", "Frequencies, correlation, agreement");
  stats->require_subcommand(1);
  std::string freq_corpus;
  std::size_t freq_top = 20;
  auto *freq = stats->add_subcommand("freq", "Change action frequencies");
  freq->add_option("--corpus", freq_corpus, "Mined corpus file")->required();
  freq->add_option("--top", freq_top, "Rows in the Markdown table (0 = all)");
  std::string sp_corpus;
  auto *spearman = stats->add_subcommand("spearman", "Pairwise project correlation");
  spearman->add_option("--corpus", sp_corpus, "Mined corpus file")->required();
  std::string ratings;
  auto *agree = stats->add_subcommand("agreement", "Inter-rater agreement");
  agree->add_option("--ratings", ratings, "Items x categories CSV")->required();

  auto *repair = app.add_subcommand("repair", "Repair model analysis");
  repair->require_subcommand(1);
  MedianArgs median_args;
  auto *median = repair->add_subcommand("median", "Median attempts");
  median->add_option("--p", median_args.p, "Shape probability");
  median->add_option("--shape", median_args.shape,
                     "Actions separated by ';' (feature labels)");
  median->add_option("--corpus", median_args.corpus, "Training corpus");
  median->add_option("--model-file", median_args.model_file, "Trained model file");
  median->add_option("--model-out", median_args.model_out, "Save the trained model");
  median->add_option("--trials", median_args.trials,
                     "Monte Carlo trials for an empirical check");

  CrossvalArgs cv_args;
  auto *crossval = app.add_subcommand("crossval", "Leave-one-project-out evaluation");
  crossval->add_option("--corpus", cv_args.corpus, "Mined corpus file")->required();
  crossval->add_option("--sizes", cv_args.sizes, "Shape sizes, e.g. 1-8 or 1,2,5");
  crossval->add_option("--eval", cv_args.evaluation,
                       "Evaluated transactions: bfp or all");

  std::string scenario;
  auto *simulate = app.add_subcommand("simulate", "Concrete repair space scenario");
  simulate->add_option("--scenario", scenario, "Scenario file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    workers(cfg); // reject a bad REPAIR_MINER_WORKERS up front
    if (*mine)
      cmd_mine(cfg, mine_args);
    else if (*slice)
      cmd_slice(cfg, slice_corpus, slice_out);
    else if (*freq)
      cmd_freq(cfg, freq_corpus, freq_top);
    else if (*spearman)
      cmd_spearman(cfg, sp_corpus);
    else if (*agree)
      cmd_agreement(cfg, ratings);
    else if (*median)
      cmd_median(cfg, median_args);
    else if (*crossval)
      cmd_crossval(cfg, cv_args);
    else if (*simulate)
      cmd_simulate(cfg, scenario);
  } catch (const rm::Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

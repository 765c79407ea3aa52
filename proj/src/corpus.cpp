#include "repair_miner/corpus.hpp"

#include "repair_miner/classify.hpp"
#include "repair_miner/errors.hpp"
#include "repair_miner/interchange.hpp"
#include "repair_miner/mini_java.hpp"

#include <json.hpp>
#include <omp.h>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace repair_miner {

using nlohmann::ordered_json;

std::string_view to_string(SourceFormat format) {
  return format == SourceFormat::source ? "source" : "interchange";
}

const std::vector<SourceCodeChange> &Transaction::mined_changes() const {
  if (!changes)
    throw NotMined("transaction " + project + "/" + id + " has not been mined");
  return *changes;
}

// ---------------------------------------------------------------------------
// Bags

TransactionBag bag_all(const std::vector<Transaction> &transactions) {
  TransactionBag bag{"ALL", {}};
  bag.members.reserve(transactions.size());
  for (const auto &t : transactions)
    bag.members.push_back(&t);
  return bag;
}

const std::vector<std::string> &default_bfp_keywords() {
  static const std::vector<std::string> keywords = {"bug", "fix", "patch"};
  return keywords;
}

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

} // namespace

bool matches_bfp(std::string_view message,
                 const std::vector<std::string> &keywords) {
  const auto text = lower(message);
  return std::any_of(keywords.begin(), keywords.end(), [&](const auto &k) {
    return text.find(lower(k)) != std::string::npos;
  });
}

TransactionBag slice_bfp(const TransactionBag &bag,
                         const std::vector<std::string> &keywords) {
  TransactionBag out{bag.name == "ALL" ? "BFP" : bag.name + "/BFP", {}};
  for (const auto *t : bag.members)
    if (matches_bfp(t->message, keywords))
      out.members.push_back(t);
  return out;
}

TransactionBag slice_bfp(const std::vector<Transaction> &transactions,
                         const std::vector<std::string> &keywords) {
  return slice_bfp(bag_all(transactions), keywords);
}

TransactionBag slice_nsc(const TransactionBag &bag, std::size_t n) {
  if (n == 0)
    throw DomainError("N-SC bags need n >= 1");
  const std::string name = std::to_string(n) + "-SC";
  TransactionBag out{bag.name == "ALL" ? name : bag.name + "/" + name, {}};
  for (const auto *t : bag.members)
    if (t->change_count() == n)
      out.members.push_back(t);
  return out;
}

TransactionBag slice_nsc(const std::vector<Transaction> &transactions,
                         std::size_t n) {
  return slice_nsc(bag_all(transactions), n);
}

// ---------------------------------------------------------------------------
// Mining

SourceTree parse_side(std::string_view text, SourceFormat format,
                      const Taxonomy &taxonomy, const std::string &path) {
  if (text.empty())
    return empty_tree(path);
  SourceTree tree = format == SourceFormat::source
                        ? parse_mini_java(text, taxonomy.entities())
                        : parse_interchange(text, taxonomy.entities());
  tree.path = path;
  return tree;
}

namespace {

struct TransactionResult {
  std::vector<SourceCodeChange> changes;
  std::vector<SkippedPair> skipped;
  std::size_t dropped = 0;
};

TransactionResult mine_one(const Transaction &t, const Taxonomy &taxonomy) {
  TransactionResult result;
  for (const auto &file : t.files) {
    try {
      const auto before = parse_side(file.before, t.format, taxonomy, file.path);
      const auto after = parse_side(file.after, t.format, taxonomy, file.path);
      auto c = diff_and_classify(before, after, taxonomy, file.path);
      result.dropped += c.dropped.size();
      result.changes.insert(result.changes.end(),
                            std::make_move_iterator(c.changes.begin()),
                            std::make_move_iterator(c.changes.end()));
    } catch (const Error &e) {
      result.skipped.push_back({t.project, t.id, file.path, e.what()});
    }
  }
  return result;
}

MiningReport merge(std::vector<Transaction> &transactions,
                   std::vector<TransactionResult> &results) {
  MiningReport report;
  report.transactions = transactions.size();
  for (std::size_t i = 0; i < transactions.size(); ++i) {
    auto &r = results[i];
    report.file_pairs += transactions[i].files.size();
    report.changes += r.changes.size();
    report.dropped_operations += r.dropped;
    std::move(r.skipped.begin(), r.skipped.end(),
              std::back_inserter(report.skipped));
    transactions[i].changes = std::move(r.changes);
  }
  return report;
}

} // namespace

MiningReport mine(std::vector<Transaction> &transactions,
                  const Taxonomy &taxonomy, int workers) {
  const auto n = static_cast<std::int64_t>(transactions.size());
  std::vector<TransactionResult> results(transactions.size());
  const int threads = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 4) num_threads(threads)
  for (std::int64_t i = 0; i < n; ++i)
    results[i] = mine_one(transactions[i], taxonomy);
  return merge(transactions, results);
}

MiningReport mine_serial(std::vector<Transaction> &transactions,
                         const Taxonomy &taxonomy) {
  std::vector<TransactionResult> results;
  results.reserve(transactions.size());
  for (const auto &t : transactions)
    results.push_back(mine_one(t, taxonomy));
  return merge(transactions, results);
}

// ---------------------------------------------------------------------------
// Records

namespace {

ordered_json side_to_json(const std::string &text, SourceFormat format) {
  if (format == SourceFormat::source)
    return text;
  if (text.empty())
    return nullptr;
  return ordered_json::parse(text);
}

std::string side_from_json(const ordered_json &j, SourceFormat format,
                           const std::string &where) {
  if (format == SourceFormat::source) {
    if (!j.is_string())
      throw SchemaError(where + ": source side must be a string");
    return j.get<std::string>();
  }
  if (j.is_null())
    return {};
  if (!j.is_object())
    throw SchemaError(where + ": interchange side must be a tree record or null");
  return j.dump(2) + "\n";
}

} // namespace

std::string to_record(const Transaction &t) {
  ordered_json j;
  j["id"] = t.id;
  j["project"] = t.project;
  j["message"] = t.message;
  j["timestamp"] = t.timestamp;
  j["format"] = std::string(to_string(t.format));
  auto files = ordered_json::array();
  for (const auto &f : t.files)
    files.push_back(ordered_json{{"path", f.path},
                                 {"before", side_to_json(f.before, t.format)},
                                 {"after", side_to_json(f.after, t.format)}});
  j["files"] = std::move(files);
  if (t.changes) {
    auto changes = ordered_json::array();
    for (const auto &c : *t.changes)
      changes.push_back(ordered_json{
          {"ct", c.ct}, {"et", c.et}, {"path", c.path}, {"line", c.line}});
    j["changes"] = std::move(changes);
  }
  return j.dump();
}

Transaction from_record(std::string_view line) {
  ordered_json j;
  try {
    j = ordered_json::parse(line.begin(), line.end());
  } catch (const nlohmann::json::parse_error &e) {
    throw SchemaError(std::string("malformed corpus record: ") + e.what());
  }
  try {
    Transaction t;
    t.id = j.at("id").get<std::string>();
    t.project = j.at("project").get<std::string>();
    t.message = j.value("message", "");
    t.timestamp = j.value("timestamp", std::int64_t{0});
    const auto format = j.value("format", "source");
    if (format == "source")
      t.format = SourceFormat::source;
    else if (format == "interchange")
      t.format = SourceFormat::interchange;
    else
      throw SchemaError("record " + t.id + ": unknown format '" + format + "'");
    for (const auto &f : j.value("files", ordered_json::array())) {
      FilePair pair;
      pair.path = f.at("path").get<std::string>();
      const std::string where = "record " + t.id + ", file " + pair.path;
      pair.before = side_from_json(f.value("before", ordered_json()), t.format, where);
      pair.after = side_from_json(f.value("after", ordered_json()), t.format, where);
      t.files.push_back(std::move(pair));
    }
    if (auto it = j.find("changes"); it != j.end() && !it->is_null()) {
      std::vector<SourceCodeChange> changes;
      for (const auto &c : *it)
        changes.push_back(SourceCodeChange{
            c.at("ct").get<std::string>(), c.at("et").get<std::string>(),
            c.value("path", ""), c.value("line", std::size_t{0})});
      t.changes = std::move(changes);
    }
    return t;
  } catch (const nlohmann::json::exception &e) {
    throw SchemaError(std::string("invalid corpus record: ") + e.what());
  }
}

std::vector<Transaction> read_corpus(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error("cannot read corpus file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  std::vector<Transaction> out;
  std::map<std::pair<std::string, std::string>, std::size_t> position;
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start < text.size()) {
    const auto end = text.find('\n', start);
    if (end == std::string::npos)
      break; // torn final record
    ++line_no;
    std::string_view line(text.data() + start, end - start);
    start = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos)
      continue;
    Transaction t;
    try {
      t = from_record(line);
    } catch (const SchemaError &e) {
      throw SchemaError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    auto key = std::make_pair(t.project, t.id);
    if (auto it = position.find(key); it != position.end()) {
      out[it->second] = std::move(t);
    } else {
      position.emplace(std::move(key), out.size());
      out.push_back(std::move(t));
    }
  }
  return out;
}

void write_corpus(const std::string &path,
                  const std::vector<Transaction> &transactions) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw Error("cannot write corpus file '" + tmp.string() + "'");
    for (const auto &t : transactions)
      out << to_record(t) << '\n';
    out.flush();
    if (!out)
      throw Error("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec)
    throw Error("cannot replace '" + path + "': " + ec.message());
}

CorpusStore::CorpusStore(std::string path) : path_(std::move(path)) {}

void CorpusStore::append(const Transaction &t) {
  append(std::vector<Transaction>{t});
}

void CorpusStore::append(const std::vector<Transaction> &transactions) {
  std::string block;
  for (const auto &t : transactions)
    block += to_record(t) + '\n';
  std::lock_guard lock(mutex_);
  std::FILE *f = std::fopen(path_.c_str(), "ab");
  if (!f)
    throw Error("cannot open corpus file '" + path_ + "' for appending");
  const bool ok = std::fwrite(block.data(), 1, block.size(), f) == block.size();
  const bool closed = std::fclose(f) == 0;
  if (!ok || !closed)
    throw Error("append to '" + path_ + "' failed");
}

std::vector<Transaction> CorpusStore::load() const {
  std::lock_guard lock(mutex_);
  if (!std::filesystem::exists(path_))
    return {};
  return read_corpus(path_);
}

} // namespace repair_miner

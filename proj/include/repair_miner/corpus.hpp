#pragma once

#include "repair_miner/taxonomy.hpp"
#include "repair_miner/tree.hpp"

#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace repair_miner {

enum class SourceFormat { source, interchange };

std::string_view to_string(SourceFormat format);

/// One revised file. An empty side means the file did not exist in that
/// revision (added or removed file). For interchange records each side holds
/// a canonical interchange document.
struct FilePair {
  std::string path;
  std::string before;
  std::string after;
  friend bool operator==(const FilePair &, const FilePair &) = default;
};

struct Transaction {
  std::string id;
  std::string project;
  std::string message;
  std::int64_t timestamp = 0;
  SourceFormat format = SourceFormat::source;
  std::vector<FilePair> files;
  /// Present once the transaction has been mined.
  std::optional<std::vector<SourceCodeChange>> changes;

  bool mined() const noexcept { return changes.has_value(); }
  /// Throws NotMined.
  const std::vector<SourceCodeChange> &mined_changes() const;
  std::size_t change_count() const { return mined_changes().size(); }

  friend bool operator==(const Transaction &, const Transaction &) = default;
};

/// Named selection of transactions. Members point into the owning corpus,
/// which must outlive the bag.
struct TransactionBag {
  std::string name;
  std::vector<const Transaction *> members;

  std::size_t size() const noexcept { return members.size(); }
  bool empty() const noexcept { return members.empty(); }
};

TransactionBag bag_all(const std::vector<Transaction> &transactions);

const std::vector<std::string> &default_bfp_keywords();

/// Case-insensitive substring match against any keyword.
bool matches_bfp(std::string_view message,
                 const std::vector<std::string> &keywords = default_bfp_keywords());

TransactionBag slice_bfp(const TransactionBag &bag,
                         const std::vector<std::string> &keywords =
                             default_bfp_keywords());
TransactionBag slice_bfp(const std::vector<Transaction> &transactions,
                         const std::vector<std::string> &keywords =
                             default_bfp_keywords());

/// Transactions with exactly n changes. Throws NotMined on an unmined
/// member and DomainError for n == 0.
TransactionBag slice_nsc(const TransactionBag &bag, std::size_t n);
TransactionBag slice_nsc(const std::vector<Transaction> &transactions,
                         std::size_t n);

// ---------------------------------------------------------------------------
// Mining

struct SkippedPair {
  std::string project;
  std::string transaction;
  std::string path;
  std::string reason;
  friend bool operator==(const SkippedPair &, const SkippedPair &) = default;
};

struct MiningReport {
  std::size_t transactions = 0;
  std::size_t file_pairs = 0;
  std::size_t changes = 0;
  std::size_t dropped_operations = 0;
  std::vector<SkippedPair> skipped; // ordered by transaction position, then file
};

/// Parses one side of a file pair; an empty text gives an empty compilation
/// unit.
SourceTree parse_side(std::string_view text, SourceFormat format,
                      const Taxonomy &taxonomy, const std::string &path);

/// Runs parse, diff and classify over every file pair and fills
/// Transaction::changes. Pairs that fail are skipped and reported. The
/// result does not depend on the worker count (0 = runtime default).
MiningReport mine(std::vector<Transaction> &transactions,
                  const Taxonomy &taxonomy, int workers = 0);

/// Single-threaded reference of mine().
MiningReport mine_serial(std::vector<Transaction> &transactions,
                         const Taxonomy &taxonomy);

// ---------------------------------------------------------------------------
// Persistence: one JSON record per line.

std::string to_record(const Transaction &t);
/// Throws SchemaError.
Transaction from_record(std::string_view line);

/// Reads a corpus file. A later record with the same (project, id) replaces
/// the earlier one in place; an unterminated final line is treated as a torn
/// write and ignored.
std::vector<Transaction> read_corpus(const std::string &path);

/// Replaces the file atomically (temporary file plus rename).
void write_corpus(const std::string &path,
                  const std::vector<Transaction> &transactions);

/// Append-only writer; each record is written and flushed as one line under
/// a lock, so concurrent appenders never interleave records.
class CorpusStore {
public:
  explicit CorpusStore(std::string path);

  void append(const Transaction &t);
  void append(const std::vector<Transaction> &transactions);
  std::vector<Transaction> load() const;
  const std::string &path() const noexcept { return path_; }

private:
  std::string path_;
  mutable std::mutex mutex_;
};

// ---------------------------------------------------------------------------
// Version control ingestion (git, run as a subprocess).

/// Command templates. Placeholders {repo}, {rev} and {path} are replaced by
/// shell-quoted values.
struct VcsCommands {
  std::string probe = "git --version";
  std::string has_commits = "git -C {repo} rev-parse --verify -q HEAD";
  std::string log = "git -C {repo} log --format=%H%x09%ct";
  std::string message = "git -C {repo} show -s --format=%B {rev}";
  std::string files =
      "git -C {repo} diff-tree --no-commit-id --no-renames -r -z --name-status "
      "--root {rev}";
  std::string show_before = "git -C {repo} show {rev}^:{path}";
  std::string show_after = "git -C {repo} show {rev}:{path}";
  std::vector<std::string> extensions = {".java"};
};

/// One transaction per commit touching at least one source file, sorted by
/// commit time then id. Unreadable file revisions are dropped with a warning.
/// Throws EnvironmentError when the tool cannot be run and Error when the
/// path is not a repository.
std::vector<Transaction> ingest_vcs(const std::string &repo_path,
                                    const std::string &project,
                                    const VcsCommands &commands = {},
                                    std::vector<std::string> *warnings = nullptr);

} // namespace repair_miner

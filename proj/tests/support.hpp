#pragma once
// Shared test helpers: fixture paths, scratch directories, synthetic corpora.

#include "repair_miner/corpus.hpp"
#include "repair_miner/taxonomy.hpp"

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace support {

inline std::string data_path(const std::string &name) {
  return std::string(TEST_DATA_DIR) + "/" + name;
}

inline std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::string &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

// Fresh directory under the system temp dir, removed on destruction.
class ScratchDir {
public:
  explicit ScratchDir(const std::string &tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("repair-miner-" + tag + "-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir &) = delete;
  ScratchDir &operator=(const ScratchDir &) = delete;

  std::string file(const std::string &name) const { return (path_ / name).string(); }
  const std::filesystem::path &path() const { return path_; }

private:
  std::filesystem::path path_;
};

// Every (change type, entity) pair the taxonomy accepts.
inline std::vector<std::pair<std::string, std::string>>
valid_pairs(const repair_miner::Taxonomy &tax) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto &ct : tax.change_types())
    for (const auto &k : tax.entities().kinds())
      if (tax.is_valid(ct, k.id))
        out.emplace_back(ct, k.id);
  return out;
}

// Mined transactions over `projects` projects with skewed, project-specific
// change distributions. Messages mention "fix" with probability 1/2.
inline std::vector<repair_miner::Transaction>
synthetic_corpus(std::uint64_t seed, std::size_t projects, std::size_t per_project,
                 const repair_miner::Taxonomy &tax, std::size_t max_changes = 8) {
  std::mt19937_64 rng(seed);
  const auto pairs = valid_pairs(tax);
  std::vector<repair_miner::Transaction> out;
  for (std::size_t p = 0; p < projects; ++p) {
    std::vector<double> w(pairs.size());
    for (std::size_t i = 0; i < w.size(); ++i)
      w[i] = std::uniform_real_distribution<double>(0, 1)(rng) < 0.3
                 ? 0.0
                 : 1.0 / static_cast<double>(1 + (i * 7 + p * 13) % pairs.size());
    w[p % w.size()] += 1.0; // never all zero
    std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
    std::uniform_int_distribution<std::size_t> size(1, max_changes);
    for (std::size_t t = 0; t < per_project; ++t) {
      repair_miner::Transaction tx;
      tx.project = "proj" + std::to_string(p);
      tx.id = "c" + std::to_string(t);
      tx.timestamp = static_cast<std::int64_t>(t);
      tx.message = (rng() % 2) ? "Fix crash in parser" : "Refactor module";
      std::vector<repair_miner::SourceCodeChange> changes;
      const auto n = size(rng);
      for (std::size_t c = 0; c < n; ++c) {
        const auto &[ct, et] = pairs[pick(rng)];
        changes.push_back({ct, et, "F.java", c + 1});
      }
      tx.changes = std::move(changes);
      out.push_back(std::move(tx));
    }
  }
  return out;
}

} // namespace support

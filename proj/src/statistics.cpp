#include "repair_miner/statistics.hpp"

#include "repair_miner/errors.hpp"
#include "text.hpp"

#include <json.hpp>
#include <omp.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace repair_miner {

using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Frequencies

std::uint64_t FrequencyTable::alpha_of(std::string_view label) const {
  return alpha[space.index_of(label)];
}

double FrequencyTable::chi_of(std::string_view label) const {
  return chi[space.index_of(label)];
}

FrequencyTable frequency_table(FeatureSpace space,
                               std::vector<std::uint64_t> counts) {
  if (counts.size() != space.size())
    throw DimensionError("count vector has " + std::to_string(counts.size()) +
                         " entries for a space of " +
                         std::to_string(space.size()));
  FrequencyTable t;
  t.space = std::move(space);
  t.alpha = std::move(counts);
  t.total = std::accumulate(t.alpha.begin(), t.alpha.end(), std::uint64_t{0});
  t.chi.assign(t.alpha.size(), 0.0);
  if (t.total > 0)
    for (std::size_t i = 0; i < t.alpha.size(); ++i)
      t.chi[i] = static_cast<double>(t.alpha[i]) / static_cast<double>(t.total);
  return t;
}

FrequencyTable frequencies(const TransactionBag &bag, const FeatureSpace &space,
                           const Taxonomy &taxonomy) {
  FeatureSpace local = space;
  std::vector<std::uint64_t> counts(local.size(), 0);
  for (const auto *t : bag.members)
    for (const auto &c : t->mined_changes()) {
      const auto label = project_to_feature(c, local, taxonomy);
      const auto index = local.extend(label);
      if (index >= counts.size())
        counts.resize(index + 1, 0);
      ++counts[index];
    }
  return frequency_table(std::move(local), std::move(counts));
}

// ---------------------------------------------------------------------------
// Spearman

std::vector<double> average_ranks(const std::vector<double> &x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]])
      ++j;
    // positions i..j (0-based) share rank mean((i+1)..(j+1))
    const double rank = (static_cast<double>(i + j) + 2.0) / 2.0;
    for (std::size_t k = i; k <= j; ++k)
      ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

std::optional<double> spearman_rho(const std::vector<double> &x,
                                   const std::vector<double> &y) {
  if (x.size() != y.size())
    throw DimensionError("spearman: vectors of length " +
                         std::to_string(x.size()) + " and " +
                         std::to_string(y.size()));
  if (x.size() < 2)
    throw DimensionError("spearman: need at least two observations");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  // Both rank vectors have mean (n + 1) / 2.
  const double mean = (static_cast<double>(x.size()) + 1.0) / 2.0;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mean;
    const double dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0 || syy == 0)
    return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

const CriticalValueTable &CriticalValueTable::builtin() {
  static const CriticalValueTable table({
      {0.01, 41, false, 0.364},
      {0.01, 60, true, 0.301},
  });
  return table;
}

double CriticalValueTable::lookup(std::size_t size, double alpha_level) const {
  const Row *best = nullptr;
  for (const auto &row : rows_) {
    if (std::abs(row.alpha_level - alpha_level) > 1e-12)
      continue;
    if (!row.open_ended && row.size == size)
      return row.value;
    if (row.open_ended && row.size <= size && (!best || row.size > best->size))
      best = &row;
  }
  if (best)
    return best->value;
  throw UnsupportedSize("no critical value for " + std::to_string(size) +
                        " features at alpha " + text::number(alpha_level));
}

bool spearman_significant(double rho, std::size_t features, double alpha_level,
                          const CriticalValueTable &table) {
  return rho > table.lookup(features, alpha_level);
}

bool spearman_significant(double rho, const FeatureSpace &space,
                          double alpha_level, const CriticalValueTable &table) {
  return spearman_significant(rho, space.size(), alpha_level, table);
}

namespace {

SpearmanMatrix empty_matrix(const std::vector<std::string> &names,
                            const std::vector<std::vector<double>> &vectors) {
  if (names.size() != vectors.size())
    throw DimensionError("spearman matrix: names and vectors differ in count");
  for (const auto &v : vectors)
    if (v.size() != vectors.front().size() || v.size() < 2)
      throw DimensionError("spearman matrix: vectors must share one length >= 2");
  SpearmanMatrix m;
  m.names = names;
  const auto n = names.size();
  m.rho.assign(n, std::vector<std::optional<double>>(n));
  m.significant.assign(n, std::vector<bool>(n, false));
  return m;
}

void fill_cell(SpearmanMatrix &m, const std::vector<std::vector<double>> &v,
               std::size_t i, std::size_t j, double alpha_level) {
  const auto rho = spearman_rho(v[i], v[j]);
  bool sig = false;
  if (rho) {
    try {
      sig = spearman_significant(*rho, v[i].size(), alpha_level);
    } catch (const UnsupportedSize &) {
    }
  }
  m.rho[i][j] = m.rho[j][i] = rho;
  m.significant[i][j] = m.significant[j][i] = sig;
}

} // namespace

SpearmanMatrix spearman_matrix(const std::vector<std::string> &names,
                               const std::vector<std::vector<double>> &vectors,
                               double alpha_level, int workers) {
  auto m = empty_matrix(names, vectors);
  const auto n = static_cast<std::int64_t>(names.size());
  std::vector<std::pair<std::size_t, std::size_t>> cells;
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = i; j < n; ++j)
      cells.emplace_back(i, j);
  const auto count = static_cast<std::int64_t>(cells.size());
  const int threads = workers > 0 ? workers : omp_get_max_threads();
  // Each cell writes two distinct slots of preallocated storage; vector<bool>
  // is packed, so significance flags are filled afterwards.
  std::vector<std::optional<double>> rho(cells.size());
  std::vector<char> sig(cells.size(), 0);
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::int64_t c = 0; c < count; ++c) {
    const auto [i, j] = cells[c];
    rho[c] = spearman_rho(vectors[i], vectors[j]);
    if (rho[c]) {
      try {
        sig[c] = spearman_significant(*rho[c], vectors[i].size(), alpha_level);
      } catch (const UnsupportedSize &) {
      }
    }
  }
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto [i, j] = cells[c];
    m.rho[i][j] = m.rho[j][i] = rho[c];
    m.significant[i][j] = m.significant[j][i] = sig[c] != 0;
  }
  return m;
}

SpearmanMatrix
spearman_matrix_serial(const std::vector<std::string> &names,
                       const std::vector<std::vector<double>> &vectors,
                       double alpha_level) {
  auto m = empty_matrix(names, vectors);
  for (std::size_t i = 0; i < names.size(); ++i)
    for (std::size_t j = i; j < names.size(); ++j)
      fill_cell(m, vectors, i, j, alpha_level);
  return m;
}

// ---------------------------------------------------------------------------
// Agreement

Agreement agreement(const RatingMatrix &ratings) {
  using i128 = __int128;
  const auto &rows = ratings.counts;
  if (rows.size() < 2)
    throw DimensionError("agreement needs at least two items");
  const std::size_t k = rows.front().size();
  if (k == 0)
    throw DimensionError("agreement needs at least one category");
  const auto raters = std::accumulate(rows.front().begin(), rows.front().end(),
                                      std::uint64_t{0});
  if (raters < 2)
    throw DimensionError("agreement needs at least two raters per item");

  std::vector<std::uint64_t> column(k, 0);
  i128 a = 0; // sum over items of (sum_j n_ij^2 - n)
  Agreement out;
  const i128 n = raters;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != k)
      throw DimensionError("rating row " + std::to_string(i + 1) + " has " +
                           std::to_string(rows[i].size()) + " categories, expected " +
                           std::to_string(k));
    i128 sum = 0, squares = 0;
    for (std::size_t j = 0; j < k; ++j) {
      sum += rows[i][j];
      squares += i128(rows[i][j]) * rows[i][j];
      column[j] += rows[i][j];
    }
    if (sum != n)
      throw DimensionError("rating row " + std::to_string(i + 1) + " sums to " +
                           std::to_string(static_cast<long long>(sum)) +
                           ", expected " + std::to_string(raters));
    out.p_i.push_back(static_cast<double>(squares - n) /
                      static_cast<double>(n * (n - 1)));
    a += squares - n;
  }
  // P_bar = A / D1 and P_e = B / D2, kept as exact fractions so that
  // kappa takes a single rounding.
  const i128 items = rows.size();
  const i128 d1 = items * n * (n - 1);
  const i128 d2 = (items * n) * (items * n);
  i128 b = 0;
  for (auto c : column)
    b += i128(c) * c;
  out.p_bar = static_cast<double>(a) / static_cast<double>(d1);
  out.p_e = static_cast<double>(b) / static_cast<double>(d2);
  if (b != d2) {
    const i128 num = a * d2 - b * d1;
    const i128 den = d1 * (d2 - b);
    const i128 limit = i128(1) << 53;
    // Correctly rounded when both terms are exact doubles.
    if (num < limit && -num < limit && den < limit)
      out.kappa = static_cast<double>(num) / static_cast<double>(den);
    else
      out.kappa = static_cast<double>(static_cast<long double>(num) /
                                      static_cast<long double>(den));
  }
  return out;
}

RatingMatrix read_ratings_csv(std::string_view text) {
  RatingMatrix m;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos)
      continue;
    std::vector<std::uint64_t> row;
    std::stringstream fields(line);
    std::string field;
    bool numeric = true;
    while (std::getline(fields, field, ',')) {
      const auto b = field.find_first_not_of(" \t");
      const auto e = field.find_last_not_of(" \t");
      const std::string f = b == std::string::npos ? "" : field.substr(b, e - b + 1);
      std::uint64_t v = 0;
      auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (f.empty() || ec != std::errc() || p != f.data() + f.size()) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (m.counts.empty() && line_no == 1)
        continue; // header
      throw SchemaError("ratings line " + std::to_string(line_no) +
                        ": expected non-negative integers");
    }
    m.counts.push_back(std::move(row));
  }
  return m;
}

// ---------------------------------------------------------------------------
// Reports

std::string frequencies_csv(const FrequencyTable &t) {
  std::string out = text::csv_row({"feature", "alpha", "chi"});
  for (std::size_t i = 0; i < t.alpha.size(); ++i)
    out += text::csv_row({t.space.features()[i], std::to_string(t.alpha[i]),
                          t.chi_defined() ? text::number(t.chi[i]) : ""});
  return out;
}

namespace {

std::vector<std::size_t> by_count(const FrequencyTable &t) {
  std::vector<std::size_t> order(t.alpha.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return t.alpha[a] > t.alpha[b];
  });
  return order;
}

} // namespace

std::string frequencies_markdown(const FrequencyTable &t, std::size_t top) {
  std::string out = "| Rank | Change action | α | χ |\n|---:|---|---:|---:|\n";
  auto order = by_count(t);
  if (top > 0 && order.size() > top)
    order.resize(top);
  std::size_t rank = 0;
  for (auto i : order)
    out += "| " + std::to_string(++rank) + " | " +
           text::md_escape(t.space.features()[i]) + " | " +
           std::to_string(t.alpha[i]) + " | " +
           (t.chi_defined() ? text::fixed(100 * t.chi[i], 1) + "%" : "n/a") +
           " |\n";
  out += "\nTotal changes: " + std::to_string(t.total) + "\n";
  return out;
}

std::string frequencies_json(const FrequencyTable &t) {
  ordered_json j;
  j["model"] = std::string(to_string(t.space.model()));
  j["total"] = t.total;
  j["chi_defined"] = t.chi_defined();
  auto rows = ordered_json::array();
  for (std::size_t i = 0; i < t.alpha.size(); ++i) {
    ordered_json row{{"feature", t.space.features()[i]}, {"alpha", t.alpha[i]}};
    row["chi"] = t.chi_defined() ? ordered_json(t.chi[i]) : ordered_json();
    rows.push_back(std::move(row));
  }
  j["features"] = std::move(rows);
  return j.dump(2) + "\n";
}

namespace {

std::string rho_text(const std::optional<double> &rho) {
  return rho ? text::fixed(*rho, 3) : "undefined";
}

} // namespace

std::string spearman_csv(const SpearmanMatrix &m) {
  std::string out = text::csv_row({"left", "right", "rho", "significant"});
  for (std::size_t i = 0; i < m.names.size(); ++i)
    for (std::size_t j = i + 1; j < m.names.size(); ++j)
      out += text::csv_row({m.names[i], m.names[j],
                            m.rho[i][j] ? text::number(*m.rho[i][j]) : "",
                            m.significant[i][j] ? "true" : "false"});
  return out;
}

std::string spearman_markdown(const SpearmanMatrix &m) {
  std::string out = "| |";
  std::string rule = "|---|";
  for (const auto &n : m.names) {
    out += " " + text::md_escape(n) + " |";
    rule += "---:|";
  }
  out += "\n" + rule + "\n";
  for (std::size_t i = 0; i < m.names.size(); ++i) {
    out += "| " + text::md_escape(m.names[i]) + " |";
    for (std::size_t j = 0; j < m.names.size(); ++j) {
      auto cell = rho_text(m.rho[i][j]);
      if (i != j && m.significant[i][j])
        cell += "*";
      out += " " + cell + " |";
    }
    out += "\n";
  }
  out += "\n\\* significant at alpha = 0.01\n";
  return out;
}

std::string spearman_json(const SpearmanMatrix &m) {
  ordered_json j;
  j["names"] = m.names;
  auto pairs = ordered_json::array();
  for (std::size_t a = 0; a < m.names.size(); ++a)
    for (std::size_t b = a + 1; b < m.names.size(); ++b) {
      ordered_json p{{"left", m.names[a]}, {"right", m.names[b]}};
      p["rho"] = m.rho[a][b] ? ordered_json(*m.rho[a][b]) : ordered_json();
      p["significant"] = static_cast<bool>(m.significant[a][b]);
      pairs.push_back(std::move(p));
    }
  j["pairs"] = std::move(pairs);
  return j.dump(2) + "\n";
}

std::string agreement_json(const Agreement &a) {
  ordered_json j;
  j["p_bar"] = a.p_bar;
  j["p_e"] = a.p_e;
  j["kappa"] = a.kappa ? ordered_json(*a.kappa) : ordered_json();
  j["kappa_defined"] = a.kappa.has_value();
  j["p_i"] = a.p_i;
  return j.dump(2) + "\n";
}

} // namespace repair_miner

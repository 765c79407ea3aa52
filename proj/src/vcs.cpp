#include "repair_miner/corpus.hpp"

#include "repair_miner/errors.hpp"

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>

namespace repair_miner {

namespace {

struct CommandResult {
  int status = -1;
  std::string out;
};

CommandResult run(const std::string &command) {
  CommandResult result;
  const std::string full = command + " 2>/dev/null";
  std::FILE *pipe = ::popen(full.c_str(), "r");
  if (!pipe)
    throw EnvironmentError("cannot start subprocess: " + command);
  std::array<char, 65536> buf{};
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0)
    result.out.append(buf.data(), n);
  const int raw = ::pclose(pipe);
  result.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return result;
}

std::string shell_quote(const std::string &s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'')
      out += "'\\''";
    else
      out += c;
  }
  return out + "'";
}

std::string expand(std::string tmpl, const std::string &repo,
                   const std::string &rev = {}, const std::string &path = {}) {
  const std::pair<const char *, const std::string *> slots[] = {
      {"{repo}", &repo}, {"{rev}", &rev}, {"{path}", &path}};
  for (const auto &[key, value] : slots) {
    const std::string quoted = shell_quote(*value);
    for (auto pos = tmpl.find(key); pos != std::string::npos;
         pos = tmpl.find(key, pos + quoted.size()))
      tmpl.replace(pos, std::string_view(key).size(), quoted);
  }
  return tmpl;
}

bool has_extension(const std::string &path,
                   const std::vector<std::string> &extensions) {
  return std::any_of(extensions.begin(), extensions.end(), [&](const auto &e) {
    return path.size() >= e.size() &&
           path.compare(path.size() - e.size(), e.size(), e) == 0;
  });
}

std::string trim_trailing_newlines(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r'))
    s.pop_back();
  return s;
}

} // namespace

std::vector<Transaction> ingest_vcs(const std::string &repo_path,
                                    const std::string &project,
                                    const VcsCommands &commands,
                                    std::vector<std::string> *warnings) {
  if (run(commands.probe).status != 0)
    throw EnvironmentError("version control tool unavailable (" +
                           commands.probe + " failed)");
  if (!std::filesystem::is_directory(repo_path))
    throw Error("repository path '" + repo_path + "' does not exist");
  if (run(expand(commands.has_commits, repo_path)).status != 0) {
    if (run(expand("git -C {repo} rev-parse --git-dir", repo_path)).status != 0)
      throw Error("'" + repo_path + "' is not a repository");
    return {}; // repository without commits
  }

  auto warn = [&](std::string w) {
    if (warnings)
      warnings->push_back(std::move(w));
  };

  const auto log = run(expand(commands.log, repo_path));
  if (log.status != 0)
    throw Error("cannot read history of '" + repo_path + "'");

  std::vector<Transaction> out;
  std::size_t pos = 0;
  while (pos < log.out.size()) {
    auto end = log.out.find('\n', pos);
    if (end == std::string::npos)
      end = log.out.size();
    const std::string line = log.out.substr(pos, end - pos);
    pos = end + 1;
    const auto tab = line.find('\t');
    if (line.empty() || tab == std::string::npos)
      continue;
    Transaction t;
    t.id = line.substr(0, tab);
    t.project = project;
    t.timestamp = std::stoll(line.substr(tab + 1));

    const auto files = run(expand(commands.files, repo_path, t.id));
    if (files.status != 0) {
      warn("revision " + t.id + ": cannot list files");
      continue;
    }
    // -z output: status NUL path NUL ...
    std::vector<std::string> fields;
    std::size_t f = 0;
    while (f < files.out.size()) {
      auto z = files.out.find('\0', f);
      if (z == std::string::npos)
        z = files.out.size();
      fields.push_back(files.out.substr(f, z - f));
      f = z + 1;
    }
    for (std::size_t i = 0; i + 1 < fields.size(); i += 2) {
      const char status = fields[i].empty() ? '?' : fields[i][0];
      const std::string &path = fields[i + 1];
      if (!has_extension(path, commands.extensions))
        continue;
      FilePair pair{path, {}, {}};
      bool ok = true;
      if (status != 'A') {
        auto r = run(expand(commands.show_before, repo_path, t.id, path));
        if (r.status != 0) {
          warn("revision " + t.id + ": cannot read previous " + path);
          ok = false;
        }
        pair.before = std::move(r.out);
      }
      if (ok && status != 'D') {
        auto r = run(expand(commands.show_after, repo_path, t.id, path));
        if (r.status != 0) {
          warn("revision " + t.id + ": cannot read " + path);
          ok = false;
        }
        pair.after = std::move(r.out);
      }
      if (ok)
        t.files.push_back(std::move(pair));
    }
    if (t.files.empty())
      continue;
    t.message =
        trim_trailing_newlines(run(expand(commands.message, repo_path, t.id)).out);
    out.push_back(std::move(t));
  }
  std::sort(out.begin(), out.end(), [](const auto &a, const auto &b) {
    return std::tie(a.timestamp, a.id) < std::tie(b.timestamp, b.id);
  });
  return out;
}

} // namespace repair_miner

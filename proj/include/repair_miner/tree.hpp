#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace repair_miner {

/// 1-based source span. The end position is inclusive (column of the last
/// character of the last token).
struct SourceRange {
  std::size_t start_line = 1;
  std::size_t start_column = 1;
  std::size_t end_line = 1;
  std::size_t end_column = 1;

  bool contains(const SourceRange &other) const noexcept;
  bool precedes(const SourceRange &other) const noexcept;

  friend bool operator==(const SourceRange &, const SourceRange &) = default;
};

struct TreeNode {
  std::string kind;
  std::string value;
  SourceRange range;
  std::vector<TreeNode> children;

  bool is_leaf() const noexcept { return children.empty(); }
  std::size_t size() const noexcept;

  friend bool operator==(const TreeNode &, const TreeNode &) = default;
};

/// Kind, value and child structure match; ranges are ignored.
bool structurally_equal(const TreeNode &a, const TreeNode &b) noexcept;

struct EntityKind {
  std::string id;    // e.g. "if_statement"
  std::string label; // e.g. "if statement"
  bool statement = false;
  bool root = false;
};

/// Closed set of entity kinds plus the table that maps parser node names
/// onto them.
class EntityTaxonomy {
public:
  EntityTaxonomy() = default;
  EntityTaxonomy(std::vector<EntityKind> kinds,
                 std::map<std::string, std::string> parser_mapping);

  static const EntityTaxonomy &default_taxonomy();

  bool contains(std::string_view id) const;
  bool is_statement(std::string_view id) const;
  bool is_root(std::string_view id) const;
  const EntityKind &kind(std::string_view id) const;
  const std::string &label(std::string_view id) const;

  /// Resolves a parser node name through the mapping table.
  const std::string &map_parser_node(std::string_view parser_name) const;

  const std::vector<EntityKind> &kinds() const noexcept { return kinds_; }
  const std::map<std::string, std::string> &parser_mapping() const noexcept {
    return mapping_;
  }

private:
  std::vector<EntityKind> kinds_;
  std::unordered_map<std::string, std::size_t> index_;
  std::map<std::string, std::string> mapping_;
};

struct SourceTree {
  TreeNode root;
  std::string path;
  std::string revision;
};

/// Throws TaxonomyError for an unknown kind and InvariantError for range,
/// leaf-value or root-kind violations.
void validate(const SourceTree &tree, const EntityTaxonomy &taxonomy);

/// Empty compilation unit used for added/removed files.
SourceTree empty_tree(std::string path = {}, std::string revision = {});

} // namespace repair_miner

#pragma once

#include "repair_miner/tree.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace repair_miner {

/// Preorder view of a tree; node ids used throughout the differ are indices
/// into this array.
class FlatTree {
public:
  struct Node {
    const TreeNode *node;
    std::optional<std::size_t> parent;
    std::size_t child_index; // position within the parent's children
    std::size_t end;         // one past the last preorder id of the subtree
    std::size_t leaves;      // number of leaf descendants (self if leaf)
  };

  explicit FlatTree(const TreeNode &root);

  std::size_t size() const noexcept { return nodes_.size(); }
  const Node &operator[](std::size_t id) const { return nodes_[id]; }
  const TreeNode &node(std::size_t id) const { return *nodes_[id].node; }
  bool is_ancestor(std::size_t ancestor, std::size_t id) const noexcept {
    return ancestor < id && id < nodes_[ancestor].end;
  }
  std::vector<std::size_t> children(std::size_t id) const;

private:
  std::vector<Node> nodes_;
};

struct MatchOptions {
  double leaf_threshold = 0.6;
  double inner_threshold = 0.5;
  /// Leaf kinds paired regardless of value when a matched parent has exactly
  /// one unmatched child of that kind on each side (void -> int, int i ->
  /// long i).
  std::vector<std::string> unique_recovery_kinds = {
      "return_type", "parameter", "parent_class", "parent_interface"};
};

/// Character-bigram Dice coefficient; strings shorter than two characters
/// score 1 when equal and 0 otherwise.
double bigram_similarity(std::string_view a, std::string_view b);

class NodeMatching {
public:
  struct Pair {
    std::size_t left;
    std::size_t right;
    double similarity;
  };

  NodeMatching() = default;
  NodeMatching(std::size_t left_size, std::size_t right_size);

  /// Returns false when either id is already paired.
  bool add(std::size_t left, std::size_t right, double similarity);

  std::optional<std::size_t> partner_of_left(std::size_t left) const;
  std::optional<std::size_t> partner_of_right(std::size_t right) const;

  /// Pairs ordered by left id.
  std::vector<Pair> pairs() const;
  std::size_t size() const noexcept { return count_; }
  std::size_t left_size() const noexcept { return to_right_.size(); }
  std::size_t right_size() const noexcept { return to_left_.size(); }

  NodeMatching inverse() const;

private:
  std::vector<std::optional<std::size_t>> to_right_;
  std::vector<std::optional<std::size_t>> to_left_;
  std::vector<double> similarity_; // indexed by left id
  std::size_t count_ = 0;
};

/// Matching in three deterministic passes: leaves by descending bigram
/// similarity (same kind, >= leaf threshold, ties broken first by parent
/// context, then by document order on both sides); inner nodes bottom-up by the fraction of shared matched
/// leaves (> inner threshold); finally, top-down, unmatched children of
/// matched parents with equal kind and similar values, plus the unique
/// recovery above. Roots of equal kind are always paired.
NodeMatching match_trees(const SourceTree &left, const SourceTree &right,
                         const MatchOptions &options = {});

enum class EditKind { insert, remove, update, move_parent, move_order };

std::string_view to_string(EditKind kind);

/// Reference to a node of the tree being rebuilt: a left node (kept) or a
/// right node (inserted).
struct NodeRef {
  bool inserted = false;
  std::size_t id = 0;
  friend bool operator==(const NodeRef &, const NodeRef &) = default;
};

struct EditOperation {
  EditKind op;
  std::size_t node;  // right id for insert, left id otherwise
  std::string kind;
  std::string value; // right value for insert, left value otherwise
  std::string new_value; // update only
  SourceRange range;

  // Context.
  std::string parent_kind;
  std::string statement_ancestor_kind;
  /// Kinds of ancestors that are inserted (for insert) or deleted (for
  /// delete) by the same script, nearest first.
  std::vector<std::string> edited_ancestor_kinds;

  /// Left parent id, for delete.
  std::optional<std::size_t> source_parent;

  // Placement in the right tree, for insert and moves.
  std::optional<NodeRef> target_parent;
  std::size_t target_position = 0;
};

/// Emits deletes, inserts, updates, parent moves and ordering moves, in that
/// order. Ordering moves are the minimal set (complement of a longest
/// increasing subsequence) per parent pair. Throws InconsistencyError if the
/// matching does not belong to the trees.
std::vector<EditOperation>
edit_script(const SourceTree &left, const SourceTree &right,
            const NodeMatching &matching,
            const EntityTaxonomy &taxonomy = EntityTaxonomy::default_taxonomy());

/// Replays a script over the left tree. The result is structurally equal to
/// the right tree the script was computed against.
TreeNode apply_edit_script(const SourceTree &left,
                           const std::vector<EditOperation> &script);

} // namespace repair_miner

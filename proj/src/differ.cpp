#include "repair_miner/differ.hpp"

#include "repair_miner/errors.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <tuple>

namespace repair_miner {

// ---------------------------------------------------------------------------
// FlatTree

FlatTree::FlatTree(const TreeNode &root) {
  nodes_.reserve(root.size());
  std::function<void(const TreeNode &, std::optional<std::size_t>, std::size_t)>
      visit = [&](const TreeNode &n, std::optional<std::size_t> parent,
                  std::size_t child_index) {
        const std::size_t id = nodes_.size();
        nodes_.push_back(Node{&n, parent, child_index, 0, 0});
        for (std::size_t i = 0; i < n.children.size(); ++i)
          visit(n.children[i], id, i);
        nodes_[id].end = nodes_.size();
        if (n.is_leaf()) {
          nodes_[id].leaves = 1;
        } else {
          std::size_t leaves = 0;
          for (std::size_t c = id + 1; c < nodes_[id].end; c = nodes_[c].end)
            leaves += nodes_[c].leaves;
          nodes_[id].leaves = leaves;
        }
      };
  visit(root, std::nullopt, 0);
}

std::vector<std::size_t> FlatTree::children(std::size_t id) const {
  std::vector<std::size_t> out;
  for (std::size_t c = id + 1; c < nodes_[id].end; c = nodes_[c].end)
    out.push_back(c);
  return out;
}

// ---------------------------------------------------------------------------
// Similarity

namespace {

std::vector<std::uint16_t> bigrams(std::string_view s) {
  std::vector<std::uint16_t> out;
  if (s.size() < 2)
    return out;
  out.reserve(s.size() - 1);
  for (std::size_t i = 0; i + 1 < s.size(); ++i)
    out.push_back(static_cast<std::uint16_t>(
        (static_cast<unsigned char>(s[i]) << 8) |
        static_cast<unsigned char>(s[i + 1])));
  std::sort(out.begin(), out.end());
  return out;
}

double dice(const std::vector<std::uint16_t> &a,
            const std::vector<std::uint16_t> &b) {
  std::size_t i = 0, j = 0, common = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      ++common;
      ++i;
      ++j;
    }
  }
  return 2.0 * static_cast<double>(common) /
         static_cast<double>(a.size() + b.size());
}

double value_similarity(std::string_view a, std::string_view b,
                        const std::vector<std::uint16_t> &ga,
                        const std::vector<std::uint16_t> &gb) {
  if (a == b)
    return 1.0;
  if (ga.empty() || gb.empty())
    return 0.0;
  return dice(ga, gb);
}

} // namespace

double bigram_similarity(std::string_view a, std::string_view b) {
  return value_similarity(a, b, bigrams(a), bigrams(b));
}

// ---------------------------------------------------------------------------
// NodeMatching

NodeMatching::NodeMatching(std::size_t left_size, std::size_t right_size)
    : to_right_(left_size), to_left_(right_size), similarity_(left_size, 0.0) {}

bool NodeMatching::add(std::size_t left, std::size_t right, double similarity) {
  if (left >= to_right_.size() || right >= to_left_.size())
    throw InconsistencyError("matched node id out of range");
  if (to_right_[left] || to_left_[right])
    return false;
  to_right_[left] = right;
  to_left_[right] = left;
  similarity_[left] = similarity;
  ++count_;
  return true;
}

std::optional<std::size_t> NodeMatching::partner_of_left(std::size_t left) const {
  return left < to_right_.size() ? to_right_[left] : std::nullopt;
}

std::optional<std::size_t>
NodeMatching::partner_of_right(std::size_t right) const {
  return right < to_left_.size() ? to_left_[right] : std::nullopt;
}

std::vector<NodeMatching::Pair> NodeMatching::pairs() const {
  std::vector<Pair> out;
  out.reserve(count_);
  for (std::size_t l = 0; l < to_right_.size(); ++l)
    if (to_right_[l])
      out.push_back(Pair{l, *to_right_[l], similarity_[l]});
  return out;
}

NodeMatching NodeMatching::inverse() const {
  NodeMatching inv(right_size(), left_size());
  for (const auto &p : pairs())
    inv.add(p.right, p.left, p.similarity);
  return inv;
}

// ---------------------------------------------------------------------------
// Matching

NodeMatching match_trees(const SourceTree &left, const SourceTree &right,
                         const MatchOptions &options) {
  const FlatTree lt(left.root);
  const FlatTree rt(right.root);
  NodeMatching m(lt.size(), rt.size());

  std::vector<std::vector<std::uint16_t>> lgrams(lt.size()), rgrams(rt.size());
  for (std::size_t i = 0; i < lt.size(); ++i)
    lgrams[i] = bigrams(lt.node(i).value);
  for (std::size_t i = 0; i < rt.size(); ++i)
    rgrams[i] = bigrams(rt.node(i).value);

  // Pass 1: leaves.
  std::map<std::string_view, std::vector<std::size_t>> right_leaves_by_kind;
  for (std::size_t r = 0; r < rt.size(); ++r)
    if (rt.node(r).is_leaf())
      right_leaves_by_kind[rt.node(r).kind].push_back(r);

  struct Candidate {
    double similarity;
    int context; // 2: parents agree on kind and value, 1: on kind
    std::size_t left;
    std::size_t right;
  };
  auto context = [&](std::size_t l, std::size_t r) {
    const auto lp = lt[l].parent, rp = rt[r].parent;
    if (!lp || !rp || lt.node(*lp).kind != rt.node(*rp).kind)
      return 0;
    return lt.node(*lp).value == rt.node(*rp).value ? 2 : 1;
  };
  std::vector<Candidate> candidates;
  for (std::size_t l = 0; l < lt.size(); ++l) {
    const auto &ln = lt.node(l);
    if (!ln.is_leaf())
      continue;
    auto it = right_leaves_by_kind.find(ln.kind);
    if (it == right_leaves_by_kind.end())
      continue;
    for (std::size_t r : it->second) {
      const double s =
          value_similarity(ln.value, rt.node(r).value, lgrams[l], rgrams[r]);
      if (s >= options.leaf_threshold)
        candidates.push_back(Candidate{s, context(l, r), l, r});
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate &a, const Candidate &b) {
              return std::tie(b.similarity, b.context, a.left, a.right) <
                     std::tie(a.similarity, a.context, b.left, b.right);
            });
  for (const auto &c : candidates)
    m.add(c.left, c.right, c.similarity);

  // Pass 2: inner nodes, bottom-up on the left.
  std::vector<std::size_t> postorder(lt.size());
  for (std::size_t i = 0; i < lt.size(); ++i)
    postorder[i] = i;
  std::sort(postorder.begin(), postorder.end(), [&](std::size_t a, std::size_t b) {
    return lt[a].end != lt[b].end ? lt[a].end < lt[b].end : a > b;
  });
  std::vector<std::size_t> shared(rt.size(), 0);
  std::vector<std::size_t> touched;
  for (std::size_t x : postorder) {
    if (lt.node(x).is_leaf() || m.partner_of_left(x))
      continue;
    touched.clear();
    for (std::size_t d = x + 1; d < lt[x].end; ++d) {
      if (!lt.node(d).is_leaf())
        continue;
      auto partner = m.partner_of_left(d);
      if (!partner)
        continue;
      for (auto y = rt[*partner].parent; y; y = rt[*y].parent) {
        if (shared[*y]++ == 0)
          touched.push_back(*y);
      }
    }
    std::sort(touched.begin(), touched.end());
    std::optional<std::size_t> best;
    double best_score = options.inner_threshold;
    for (std::size_t y : touched) {
      if (m.partner_of_right(y) || rt.node(y).kind != lt.node(x).kind)
        continue;
      const double score =
          static_cast<double>(shared[y]) /
          static_cast<double>(std::max(lt[x].leaves, rt[y].leaves));
      if (score > best_score) {
        best_score = score;
        best = y;
      }
    }
    for (std::size_t y : touched)
      shared[y] = 0;
    if (best)
      m.add(x, *best, best_score);
  }

  // Roots.
  if (!m.partner_of_left(0) && !m.partner_of_right(0) &&
      lt.node(0).kind == rt.node(0).kind)
    m.add(0, 0, value_similarity(lt.node(0).value, rt.node(0).value, lgrams[0],
                                 rgrams[0]));

  // Pass 3: top-down completion under matched parents.
  for (std::size_t x = 0; x < lt.size(); ++x) {
    auto y = m.partner_of_left(x);
    if (!y)
      continue;
    const auto right_children = rt.children(*y);
    for (std::size_t cx : lt.children(x)) {
      if (m.partner_of_left(cx))
        continue;
      std::optional<std::size_t> best;
      double best_score = -1.0;
      for (std::size_t cy : right_children) {
        if (m.partner_of_right(cy) || rt.node(cy).kind != lt.node(cx).kind)
          continue;
        const double s = value_similarity(lt.node(cx).value, rt.node(cy).value,
                                          lgrams[cx], rgrams[cy]);
        if (s >= options.leaf_threshold && s > best_score) {
          best_score = s;
          best = cy;
        }
      }
      if (best)
        m.add(cx, *best, best_score);
    }
    for (const auto &kind : options.unique_recovery_kinds) {
      std::optional<std::size_t> only_l, only_r;
      std::size_t nl = 0, nr = 0;
      for (std::size_t cx : lt.children(x))
        if (!m.partner_of_left(cx) && lt.node(cx).kind == kind &&
            lt.node(cx).is_leaf()) {
          only_l = cx;
          ++nl;
        }
      for (std::size_t cy : right_children)
        if (!m.partner_of_right(cy) && rt.node(cy).kind == kind &&
            rt.node(cy).is_leaf()) {
          only_r = cy;
          ++nr;
        }
      if (nl == 1 && nr == 1)
        m.add(*only_l, *only_r,
              value_similarity(lt.node(*only_l).value, rt.node(*only_r).value,
                               lgrams[*only_l], rgrams[*only_r]));
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// Edit script

std::string_view to_string(EditKind kind) {
  switch (kind) {
  case EditKind::insert:
    return "INSERT";
  case EditKind::remove:
    return "DELETE";
  case EditKind::update:
    return "UPDATE";
  case EditKind::move_parent:
    return "MOVE_PARENT";
  case EditKind::move_order:
    return "MOVE_ORDER";
  }
  return "?";
}

namespace {

// Indices (into seq) of one longest strictly increasing subsequence.
std::vector<std::size_t> longest_increasing(const std::vector<std::size_t> &seq) {
  std::vector<std::size_t> tails; // indices into seq
  std::vector<std::optional<std::size_t>> prev(seq.size());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    auto it = std::lower_bound(
        tails.begin(), tails.end(), seq[i],
        [&](std::size_t idx, std::size_t value) { return seq[idx] < value; });
    if (it != tails.begin())
      prev[i] = *(it - 1);
    if (it == tails.end())
      tails.push_back(i);
    else
      *it = i;
  }
  std::vector<std::size_t> out;
  if (tails.empty())
    return out;
  for (std::optional<std::size_t> i = tails.back(); i; i = prev[*i])
    out.push_back(*i);
  std::reverse(out.begin(), out.end());
  return out;
}

std::string statement_ancestor(const FlatTree &t, std::size_t id,
                               const EntityTaxonomy &taxonomy) {
  for (auto a = t[id].parent; a; a = t[*a].parent)
    if (taxonomy.is_statement(t.node(*a).kind))
      return t.node(*a).kind;
  return {};
}

} // namespace

std::vector<EditOperation> edit_script(const SourceTree &left,
                                       const SourceTree &right,
                                       const NodeMatching &matching,
                                       const EntityTaxonomy &taxonomy) {
  const FlatTree lt(left.root);
  const FlatTree rt(right.root);
  if (matching.left_size() != lt.size() || matching.right_size() != rt.size())
    throw InconsistencyError("matching was computed for different trees");
  for (const auto &p : matching.pairs())
    if (lt.node(p.left).kind != rt.node(p.right).kind)
      throw InconsistencyError("matched nodes " + std::to_string(p.left) + "/" +
                               std::to_string(p.right) + " differ in kind");

  auto right_parent_ref = [&](std::size_t y) {
    const std::size_t py = *rt[y].parent;
    if (auto px = matching.partner_of_right(py))
      return NodeRef{false, *px};
    return NodeRef{true, py};
  };

  std::vector<EditOperation> script;

  for (std::size_t x = 0; x < lt.size(); ++x) {
    if (matching.partner_of_left(x))
      continue;
    EditOperation op{EditKind::remove, x, lt.node(x).kind, lt.node(x).value, {},
                     lt.node(x).range};
    if (auto p = lt[x].parent) {
      op.parent_kind = lt.node(*p).kind;
      op.source_parent = *p;
      for (auto a = p; a; a = lt[*a].parent)
        if (!matching.partner_of_left(*a))
          op.edited_ancestor_kinds.push_back(lt.node(*a).kind);
    }
    op.statement_ancestor_kind = statement_ancestor(lt, x, taxonomy);
    script.push_back(std::move(op));
  }

  for (std::size_t y = 0; y < rt.size(); ++y) {
    if (matching.partner_of_right(y))
      continue;
    EditOperation op{EditKind::insert, y, rt.node(y).kind, rt.node(y).value, {},
                     rt.node(y).range};
    if (auto p = rt[y].parent) {
      op.parent_kind = rt.node(*p).kind;
      for (auto a = p; a; a = rt[*a].parent)
        if (!matching.partner_of_right(*a))
          op.edited_ancestor_kinds.push_back(rt.node(*a).kind);
      op.target_parent = right_parent_ref(y);
      op.target_position = rt[y].child_index;
    }
    op.statement_ancestor_kind = statement_ancestor(rt, y, taxonomy);
    script.push_back(std::move(op));
  }

  const auto pairs = matching.pairs();
  for (const auto &p : pairs) {
    const auto &ln = lt.node(p.left);
    const auto &rn = rt.node(p.right);
    if (ln.value == rn.value)
      continue;
    EditOperation op{EditKind::update, p.left, ln.kind, ln.value, rn.value,
                     rn.range};
    if (auto parent = rt[p.right].parent)
      op.parent_kind = rt.node(*parent).kind;
    op.statement_ancestor_kind = statement_ancestor(rt, p.right, taxonomy);
    script.push_back(std::move(op));
  }

  for (const auto &p : pairs) {
    const auto lp = lt[p.left].parent;
    const auto rp = rt[p.right].parent;
    if (!lp || !rp)
      continue;
    if (matching.partner_of_left(*lp) == rp)
      continue;
    EditOperation op{EditKind::move_parent, p.left, lt.node(p.left).kind,
                     lt.node(p.left).value, {}, rt.node(p.right).range};
    op.parent_kind = rt.node(*rp).kind;
    op.statement_ancestor_kind = statement_ancestor(rt, p.right, taxonomy);
    op.target_parent = right_parent_ref(p.right);
    op.target_position = rt[p.right].child_index;
    script.push_back(std::move(op));
  }

  for (const auto &p : pairs) {
    // Children of the right node that stay under the same (matched) parent.
    std::vector<std::size_t> right_kids;
    std::vector<std::size_t> left_positions;
    for (std::size_t cy : rt.children(p.right)) {
      auto cx = matching.partner_of_right(cy);
      if (cx && lt[*cx].parent == p.left) {
        right_kids.push_back(cy);
        left_positions.push_back(lt[*cx].child_index);
      }
    }
    const auto keep = longest_increasing(left_positions);
    std::vector<bool> stays(right_kids.size(), false);
    for (std::size_t i : keep)
      stays[i] = true;
    for (std::size_t i = 0; i < right_kids.size(); ++i) {
      if (stays[i])
        continue;
      const std::size_t cy = right_kids[i];
      const std::size_t cx = *matching.partner_of_right(cy);
      EditOperation op{EditKind::move_order, cx, lt.node(cx).kind,
                       lt.node(cx).value, {}, rt.node(cy).range};
      op.parent_kind = rt.node(p.right).kind;
      op.statement_ancestor_kind = statement_ancestor(rt, cy, taxonomy);
      op.target_parent = NodeRef{false, p.left};
      op.target_position = rt[cy].child_index;
      script.push_back(std::move(op));
    }
  }
  return script;
}

// ---------------------------------------------------------------------------
// Replay

TreeNode apply_edit_script(const SourceTree &left,
                           const std::vector<EditOperation> &script) {
  struct Work {
    std::string kind;
    std::string value;
    SourceRange range;
    std::vector<NodeRef> children;
    std::optional<NodeRef> parent;
    bool deleted = false;
  };
  const FlatTree lt(left.root);
  std::vector<Work> kept(lt.size());
  std::map<std::size_t, Work> added;
  for (std::size_t i = 0; i < lt.size(); ++i) {
    const auto &n = lt.node(i);
    kept[i].kind = n.kind;
    kept[i].value = n.value;
    kept[i].range = n.range;
    if (lt[i].parent)
      kept[i].parent = NodeRef{false, *lt[i].parent};
    for (std::size_t c : lt.children(i))
      kept[i].children.push_back(NodeRef{false, c});
  }
  auto work = [&](const NodeRef &ref) -> Work & {
    if (!ref.inserted) {
      if (ref.id >= kept.size())
        throw InconsistencyError("script references an unknown left node");
      return kept[ref.id];
    }
    auto it = added.find(ref.id);
    if (it == added.end())
      throw InconsistencyError("script references an unknown inserted node");
    return it->second;
  };
  auto detach = [&](const NodeRef &ref) {
    Work &w = work(ref);
    if (!w.parent)
      return;
    auto &siblings = work(*w.parent).children;
    siblings.erase(std::remove(siblings.begin(), siblings.end(), ref),
                   siblings.end());
    w.parent.reset();
  };

  std::vector<const EditOperation *> attachments;
  for (const auto &op : script) {
    switch (op.op) {
    case EditKind::remove:
      detach(NodeRef{false, op.node});
      kept.at(op.node).deleted = true;
      break;
    case EditKind::update:
      kept.at(op.node).value = op.new_value;
      break;
    case EditKind::move_parent:
    case EditKind::move_order:
      detach(NodeRef{false, op.node});
      attachments.push_back(&op);
      break;
    case EditKind::insert:
      added[op.node] = Work{op.kind, op.value, op.range, {}, std::nullopt, false};
      attachments.push_back(&op);
      break;
    }
  }
  std::stable_sort(attachments.begin(), attachments.end(),
                   [](const EditOperation *a, const EditOperation *b) {
                     return a->target_position < b->target_position;
                   });
  for (const auto *op : attachments) {
    if (!op->target_parent)
      throw InconsistencyError("insert or move without a target parent");
    const NodeRef self{op->op == EditKind::insert, op->node};
    auto &siblings = work(*op->target_parent).children;
    const std::size_t at = std::min(op->target_position, siblings.size());
    siblings.insert(siblings.begin() + static_cast<std::ptrdiff_t>(at), self);
    work(self).parent = *op->target_parent;
  }

  std::function<TreeNode(const NodeRef &)> build = [&](const NodeRef &ref) {
    const Work &w = work(ref);
    TreeNode n{w.kind, w.value, w.range, {}};
    for (const auto &c : w.children)
      if (c.inserted || !kept[c.id].deleted)
        n.children.push_back(build(c));
    return n;
  };
  return build(NodeRef{false, 0});
}

} // namespace repair_miner

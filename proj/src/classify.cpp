#include "repair_miner/classify.hpp"

#include "repair_miner/errors.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <variant>

namespace repair_miner {

namespace {

namespace c = change_type;

bool is_declaration(std::string_view kind) {
  return kind == "method" || kind == "class" || kind == "attribute";
}

// private < package < protected < public
std::optional<int> access_level(std::string_view modifier) {
  if (modifier == "private")
    return 0;
  if (modifier == "protected")
    return 2;
  if (modifier == "public")
    return 3;
  return std::nullopt;
}
constexpr int package_level = 1;

std::string_view accessibility(int from, int to) {
  return to > from ? c::increasing_accessibility_change
                   : c::decreasing_accessibility_change;
}

// "final int x = 3" style declaration text -> (type, name).
std::pair<std::string, std::string> split_declaration(std::string_view text) {
  std::string head(text.substr(0, text.find(" =")));
  const auto space = head.rfind(' ');
  if (space == std::string::npos)
    return {"", head};
  return {head.substr(0, space), head.substr(space + 1)};
}

struct Rule {
  std::string ct;
  std::string et;
};

using Outcome = std::variant<Rule, std::string>; // rule or drop reason

class Classifier {
public:
  Classifier(const std::vector<EditOperation> &ops, const Taxonomy &taxonomy)
      : ops_(ops), tax_(taxonomy) {
    pair_access_modifiers();
  }

  std::optional<Outcome> classify(std::size_t index) const {
    if (auto it = merged_into_.find(index); it != merged_into_.end())
      return Outcome{std::string("merged into accessibility change of operation ") +
                     std::to_string(it->second)};
    if (auto it = merged_access_.find(index); it != merged_access_.end())
      return Outcome{it->second};

    const auto &op = ops_[index];
    switch (op.op) {
    case EditKind::insert:
    case EditKind::remove:
      return insert_or_delete(op, op.op == EditKind::insert);
    case EditKind::update:
      return update(op);
    case EditKind::move_parent:
      if (statement(op.kind))
        return Outcome{Rule{std::string(c::statement_parent_change), op.kind}};
      return Outcome{std::string("move of non-statement entity '") + op.kind +
                     "' is not modeled"};
    case EditKind::move_order:
      if (statement(op.kind))
        return Outcome{Rule{std::string(c::statement_ordering_change), op.kind}};
      if (op.kind == "parameter")
        return Outcome{Rule{std::string(c::parameter_ordering_change), op.kind}};
      return Outcome{std::string("reordering of '") + op.kind +
                     "' is not modeled"};
    }
    return std::nullopt;
  }

private:
  bool statement(std::string_view kind) const {
    return tax_.entities().is_statement(kind);
  }

  static Outcome rule(std::string_view ct, std::string et) {
    return Outcome{Rule{std::string(ct), std::move(et)}};
  }

  // A deleted access modifier and an inserted one on the same owner form one
  // accessibility change.
  void pair_access_modifiers() {
    for (std::size_t d = 0; d < ops_.size(); ++d) {
      const auto &del = ops_[d];
      if (del.op != EditKind::remove || del.kind != "modifier" ||
          !access_level(del.value) || !del.source_parent ||
          !del.edited_ancestor_kinds.empty())
        continue;
      for (std::size_t i = 0; i < ops_.size(); ++i) {
        const auto &ins = ops_[i];
        if (ins.op != EditKind::insert || ins.kind != "modifier" ||
            !access_level(ins.value) || !ins.target_parent ||
            ins.target_parent->inserted ||
            ins.target_parent->id != *del.source_parent ||
            merged_into_.count(i) || merged_access_.count(i))
          continue;
        const int from = *access_level(del.value);
        const int to = *access_level(ins.value);
        merged_access_.emplace(i, Rule{std::string(accessibility(from, to)),
                                       ins.parent_kind});
        merged_into_.emplace(d, i);
        break;
      }
    }
  }

  Outcome insert_or_delete(const EditOperation &op, bool insert) const {
    const auto &edited = op.edited_ancestor_kinds;
    const bool under_declaration =
        std::any_of(edited.begin(), edited.end(),
                    [](const std::string &k) { return is_declaration(k); });

    if (statement(op.kind)) {
      if (under_declaration && tax_.method_body_rule() == MethodBodyRule::absorb)
        return std::string("statement inside ") +
               (insert ? "inserted " : "deleted ") + edited.back();
      return rule(insert ? c::statement_insert : c::statement_delete, op.kind);
    }
    if (!edited.empty())
      return std::string("part of ") + (insert ? "inserted " : "deleted ") +
             edited.front();

    if (op.kind == "else_statement")
      return rule(insert ? c::else_part_insert : c::else_part_delete, op.kind);
    if (op.kind == "method")
      return rule(insert ? c::additional_functionality : c::removed_functionality,
                  op.kind);
    if (op.kind == "attribute")
      return rule(insert ? c::attribute_addition : c::attribute_removal, op.kind);
    if (op.kind == "class")
      return rule(insert ? c::additional_class : c::removed_class, op.kind);
    if (op.kind == "parameter")
      return rule(insert ? c::parameter_insert : c::parameter_delete, op.kind);
    if (op.kind == "return_type")
      return rule(insert ? c::return_type_insert : c::return_type_delete, op.kind);
    if (op.kind == "parent_class")
      return rule(insert ? c::parent_class_insert : c::parent_class_delete,
                  op.kind);
    if (op.kind == "parent_interface")
      return rule(insert ? c::parent_interface_insert : c::parent_interface_delete,
                  op.kind);
    if (op.kind == "modifier")
      return modifier(op, insert);
    if (tax_.strict())
      throw UnclassifiableChange("no rule for " + std::string(to_string(op.op)) +
                                 " of '" + op.kind + "'");
    return std::string("no rule for ") + std::string(to_string(op.op)) + " of '" +
           op.kind + "'";
  }

  Outcome modifier(const EditOperation &op, bool insert) const {
    const auto &owner = op.parent_kind;
    if (auto level = access_level(op.value)) {
      const int from = insert ? package_level : *level;
      const int to = insert ? *level : package_level;
      return rule(accessibility(from, to), owner);
    }
    if (op.value == "final") {
      if (owner == "class")
        return rule(insert ? c::addition_of_class_derivability
                           : c::removal_of_class_derivability,
                    owner);
      if (owner == "method")
        return rule(insert ? c::addition_of_method_overridability
                           : c::removal_of_method_overridability,
                    owner);
      if (owner == "attribute")
        return rule(insert ? c::addition_of_attribute_modifiability
                           : c::removal_of_attribute_modifiability,
                    owner);
    }
    return std::string("modifier '") + op.value + "' is not modeled";
  }

  Outcome update(const EditOperation &op) const {
    const auto &k = op.kind;
    if (k == "if_statement" || k == "while_statement" || k == "for_statement")
      return rule(c::condition_expression_change, k);
    if (statement(k)) {
      if (tax_.is_valid(c::statement_update, k))
        return rule(c::statement_update, k);
    } else if (k == "method") {
      return rule(c::method_renaming, k);
    } else if (k == "class") {
      return rule(c::class_renaming, k);
    } else if (k == "attribute" || k == "parameter") {
      const auto before = split_declaration(op.value);
      const auto after = split_declaration(op.new_value);
      const bool attribute = k == "attribute";
      if (before.first != after.first)
        return rule(attribute ? c::attribute_type_change : c::parameter_type_change,
                    k);
      if (before.second != after.second)
        return rule(attribute ? c::attribute_renaming : c::parameter_renaming, k);
      if (attribute)
        return rule(c::unclassified_change, k);
    } else if (k == "return_type") {
      return rule(c::return_type_change, k);
    } else if (k == "parent_class") {
      return rule(c::parent_class_change, k);
    } else if (k == "parent_interface") {
      return rule(c::parent_interface_change, k);
    } else if (k == "modifier") {
      const auto from = access_level(op.value);
      const auto to = access_level(op.new_value);
      if (from && to)
        return rule(accessibility(*from, *to), op.parent_kind);
      return std::string("modifier update '") + op.value + "' -> '" +
             op.new_value + "' is not modeled";
    }
    if (tax_.strict())
      throw UnclassifiableChange("no rule for UPDATE of '" + k + "'");
    return std::string("no rule for UPDATE of '") + k + "'";
  }

  const std::vector<EditOperation> &ops_;
  const Taxonomy &tax_;
  std::map<std::size_t, std::size_t> merged_into_;
  std::map<std::size_t, Rule> merged_access_;
};

} // namespace

Classification classify(const std::vector<EditOperation> &ops,
                        const Taxonomy &taxonomy, const std::string &path) {
  Classifier classifier(ops, taxonomy);
  Classification out;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    auto outcome = classifier.classify(i);
    if (!outcome) {
      out.dropped.push_back({i, "no outcome"});
      continue;
    }
    if (auto *r = std::get_if<Rule>(&*outcome)) {
      if (!taxonomy.is_valid(r->ct, r->et)) {
        if (taxonomy.strict())
          throw UnclassifiableChange("rule produced invalid combination (" +
                                     r->ct + ", " + r->et + ")");
        out.dropped.push_back({i, "invalid combination (" + r->ct + ", " +
                                      r->et + ")"});
        continue;
      }
      out.changes.push_back(
          SourceCodeChange{r->ct, r->et, path, ops[i].range.start_line});
    } else {
      out.dropped.push_back({i, std::get<std::string>(*outcome)});
    }
  }
  return out;
}

Classification diff_and_classify(const SourceTree &before,
                                 const SourceTree &after,
                                 const Taxonomy &taxonomy,
                                 const std::string &path) {
  const auto matching = match_trees(before, after);
  const auto ops = edit_script(before, after, matching, taxonomy.entities());
  return classify(ops, taxonomy, path);
}

} // namespace repair_miner

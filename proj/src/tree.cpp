#include "repair_miner/tree.hpp"

#include "repair_miner/errors.hpp"

#include <tuple>

namespace repair_miner {

namespace {

auto start_of(const SourceRange &r) {
  return std::tie(r.start_line, r.start_column);
}
auto end_of(const SourceRange &r) { return std::tie(r.end_line, r.end_column); }

void validate_node(const TreeNode &node, const EntityTaxonomy &taxonomy,
                   const std::string &path, bool is_root) {
  if (!taxonomy.contains(node.kind))
    throw TaxonomyError("unknown entity kind '" + node.kind + "' at " + path);
  if (start_of(node.range) > end_of(node.range))
    throw InvariantError("range ends before it starts at " + path);
  if (!is_root && node.is_leaf() && node.value.empty())
    throw InvariantError("leaf node '" + node.kind + "' has an empty value at " +
                         path);
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    const auto &child = node.children[i];
    const auto child_path = path + "/" + std::to_string(i);
    if (!node.range.contains(child.range))
      throw InvariantError("child range exceeds parent range at " + child_path);
    if (i > 0 && !node.children[i - 1].range.precedes(child.range))
      throw InvariantError("sibling ranges overlap or are out of order at " +
                           child_path);
    validate_node(child, taxonomy, child_path, false);
  }
}

EntityTaxonomy make_default() {
  std::vector<EntityKind> kinds = {
      {"compilation_unit", "compilation unit", false, true},
      {"class", "class", false, false},
      {"attribute", "attribute", false, false},
      {"method", "method", false, false},
      {"parameter", "parameter", false, false},
      {"return_type", "return type", false, false},
      {"modifier", "modifier", false, false},
      {"parent_class", "parent class", false, false},
      {"parent_interface", "parent interface", false, false},
      {"else_statement", "else statement", false, false},
      {"assignment", "assignment", true, false},
      {"method_invocation", "method invocation", true, false},
      {"class_instance_creation", "class instance creation", true, false},
      {"variable_declaration_statement", "variable declaration statement", true,
       false},
      {"return_statement", "return statement", true, false},
      {"if_statement", "if statement", true, false},
      {"while_statement", "while statement", true, false},
      {"for_statement", "for statement", true, false},
      {"throw_statement", "throw statement", true, false},
      {"try_statement", "try statement", true, false},
      {"catch_clause", "catch clause", true, false},
      {"finally_clause", "finally clause", true, false},
      {"break_statement", "break statement", true, false},
      {"continue_statement", "continue statement", true, false},
      {"postfix_expression", "postfix expression", true, false},
  };
  std::map<std::string, std::string> mapping = {
      {"CompilationUnit", "compilation_unit"},
      {"TypeDeclaration", "class"},
      {"FieldDeclaration", "attribute"},
      {"MethodDeclaration", "method"},
      {"SingleVariableDeclaration", "parameter"},
      {"ReturnType", "return_type"},
      {"Modifier", "modifier"},
      {"SuperclassType", "parent_class"},
      {"SuperInterfaceType", "parent_interface"},
      {"ElseStatement", "else_statement"},
      {"Assignment", "assignment"},
      {"MethodInvocation", "method_invocation"},
      {"ClassInstanceCreation", "class_instance_creation"},
      {"VariableDeclarationStatement", "variable_declaration_statement"},
      {"ReturnStatement", "return_statement"},
      {"IfStatement", "if_statement"},
      {"WhileStatement", "while_statement"},
      {"ForStatement", "for_statement"},
      {"EnhancedForStatement", "for_statement"},
      {"ThrowStatement", "throw_statement"},
      {"TryStatement", "try_statement"},
      {"CatchClause", "catch_clause"},
      {"FinallyClause", "finally_clause"},
      {"BreakStatement", "break_statement"},
      {"ContinueStatement", "continue_statement"},
      {"PostfixExpression", "postfix_expression"},
      {"PrefixExpression", "postfix_expression"},
  };
  return EntityTaxonomy(std::move(kinds), std::move(mapping));
}

} // namespace

bool SourceRange::contains(const SourceRange &other) const noexcept {
  return start_of(*this) <= start_of(other) && end_of(other) <= end_of(*this);
}

bool SourceRange::precedes(const SourceRange &other) const noexcept {
  return end_of(*this) < start_of(other);
}

std::size_t TreeNode::size() const noexcept {
  std::size_t n = 1;
  for (const auto &c : children)
    n += c.size();
  return n;
}

bool structurally_equal(const TreeNode &a, const TreeNode &b) noexcept {
  if (a.kind != b.kind || a.value != b.value ||
      a.children.size() != b.children.size())
    return false;
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (!structurally_equal(a.children[i], b.children[i]))
      return false;
  return true;
}

EntityTaxonomy::EntityTaxonomy(std::vector<EntityKind> kinds,
                               std::map<std::string, std::string> parser_mapping)
    : kinds_(std::move(kinds)), mapping_(std::move(parser_mapping)) {
  for (std::size_t i = 0; i < kinds_.size(); ++i) {
    if (kinds_[i].id.empty())
      throw TaxonomyError("entity kind with empty id");
    if (!index_.emplace(kinds_[i].id, i).second)
      throw TaxonomyError("duplicate entity kind '" + kinds_[i].id + "'");
  }
  for (const auto &[from, to] : mapping_)
    if (!contains(to))
      throw TaxonomyError("parser mapping '" + from +
                          "' targets unknown kind '" + to + "'");
}

const EntityTaxonomy &EntityTaxonomy::default_taxonomy() {
  static const EntityTaxonomy taxonomy = make_default();
  return taxonomy;
}

bool EntityTaxonomy::contains(std::string_view id) const {
  return index_.find(std::string(id)) != index_.end();
}

bool EntityTaxonomy::is_statement(std::string_view id) const {
  return contains(id) && kind(id).statement;
}

bool EntityTaxonomy::is_root(std::string_view id) const {
  return contains(id) && kind(id).root;
}

const EntityKind &EntityTaxonomy::kind(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end())
    throw TaxonomyError("unknown entity kind '" + std::string(id) + "'");
  return kinds_[it->second];
}

const std::string &EntityTaxonomy::label(std::string_view id) const {
  return kind(id).label;
}

const std::string &
EntityTaxonomy::map_parser_node(std::string_view parser_name) const {
  auto it = mapping_.find(std::string(parser_name));
  if (it == mapping_.end())
    throw TaxonomyError("no entity kind mapped for parser node '" +
                        std::string(parser_name) + "'");
  return it->second;
}

void validate(const SourceTree &tree, const EntityTaxonomy &taxonomy) {
  validate_node(tree.root, taxonomy, "", true);
  if (!taxonomy.is_root(tree.root.kind))
    throw InvariantError("root kind '" + tree.root.kind +
                         "' is not a compilation-unit-level entity");
}

SourceTree empty_tree(std::string path, std::string revision) {
  return SourceTree{TreeNode{"compilation_unit", "", {}, {}}, std::move(path),
                    std::move(revision)};
}

} // namespace repair_miner

#pragma once

#include "repair_miner/tree.hpp"

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace repair_miner {

/// Change type labels used by the built-in classifier rules.
namespace change_type {
inline constexpr std::string_view statement_insert = "statement insert";
inline constexpr std::string_view statement_delete = "statement delete";
inline constexpr std::string_view statement_update = "statement update";
inline constexpr std::string_view statement_parent_change = "statement parent change";
inline constexpr std::string_view statement_ordering_change = "statement ordering change";
inline constexpr std::string_view condition_expression_change = "condition expression change";
inline constexpr std::string_view else_part_insert = "else-part insert";
inline constexpr std::string_view else_part_delete = "else-part delete";
inline constexpr std::string_view additional_functionality = "additional functionality";
inline constexpr std::string_view removed_functionality = "removed functionality";
inline constexpr std::string_view attribute_addition = "attribute addition";
inline constexpr std::string_view attribute_removal = "attribute removal";
inline constexpr std::string_view attribute_renaming = "attribute renaming";
inline constexpr std::string_view attribute_type_change = "attribute type change";
inline constexpr std::string_view additional_class = "additional class";
inline constexpr std::string_view removed_class = "removed class";
inline constexpr std::string_view class_renaming = "class renaming";
inline constexpr std::string_view method_renaming = "method renaming";
inline constexpr std::string_view parameter_insert = "parameter insert";
inline constexpr std::string_view parameter_delete = "parameter delete";
inline constexpr std::string_view parameter_ordering_change = "parameter ordering change";
inline constexpr std::string_view parameter_renaming = "parameter renaming";
inline constexpr std::string_view parameter_type_change = "parameter type change";
inline constexpr std::string_view return_type_insert = "return type insert";
inline constexpr std::string_view return_type_delete = "return type delete";
inline constexpr std::string_view return_type_change = "return type change";
inline constexpr std::string_view increasing_accessibility_change = "increasing accessibility change";
inline constexpr std::string_view decreasing_accessibility_change = "decreasing accessibility change";
inline constexpr std::string_view addition_of_class_derivability = "addition of class derivability";
inline constexpr std::string_view removal_of_class_derivability = "removal of class derivability";
inline constexpr std::string_view addition_of_method_overridability = "addition of method overridability";
inline constexpr std::string_view removal_of_method_overridability = "removal of method overridability";
inline constexpr std::string_view addition_of_attribute_modifiability = "addition of attribute modifiability";
inline constexpr std::string_view removal_of_attribute_modifiability = "removal of attribute modifiability";
inline constexpr std::string_view parent_class_insert = "parent class insert";
inline constexpr std::string_view parent_class_delete = "parent class delete";
inline constexpr std::string_view parent_class_change = "parent class change";
inline constexpr std::string_view parent_interface_insert = "parent interface insert";
inline constexpr std::string_view parent_interface_delete = "parent interface delete";
inline constexpr std::string_view parent_interface_change = "parent interface change";
inline constexpr std::string_view unclassified_change = "unclassified change";
} // namespace change_type

enum class ChangeModel { ct, ctet };

std::string_view to_string(ChangeModel model);
ChangeModel parse_change_model(std::string_view text);

/// How statements nested in an inserted or deleted method are counted.
enum class MethodBodyRule {
  absorb, // the method change stands alone
  count,  // each body statement also yields a statement insert/delete
};

/// Ordered, duplicate-free list of feature labels.
class FeatureSpace {
public:
  FeatureSpace() = default;
  FeatureSpace(ChangeModel model, std::vector<std::string> features);

  ChangeModel model() const noexcept { return model_; }
  const std::vector<std::string> &features() const noexcept { return features_; }
  std::size_t size() const noexcept { return features_.size(); }
  bool contains(std::string_view label) const;
  /// Throws UnknownFeature.
  std::size_t index_of(std::string_view label) const;

  /// Appends the label if absent; returns its index.
  std::size_t extend(const std::string &label);

  friend bool operator==(const FeatureSpace &a, const FeatureSpace &b) {
    return a.model_ == b.model_ && a.features_ == b.features_;
  }

private:
  ChangeModel model_ = ChangeModel::ct;
  std::vector<std::string> features_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// The 2-value classification of one AST edit: change type plus entity kind.
struct SourceCodeChange {
  std::string ct; // change type label, e.g. "statement insert"
  std::string et; // entity kind id, e.g. "if_statement"
  std::string path;
  std::size_t line = 0;

  friend bool operator==(const SourceCodeChange &,
                         const SourceCodeChange &) = default;
};

/// Entity kinds, change types and the valid (change type, entity) table.
class Taxonomy {
public:
  Taxonomy(EntityTaxonomy entities, std::vector<std::string> change_types,
           std::map<std::string, std::vector<std::string>> valid_combinations,
           MethodBodyRule method_body_rule = MethodBodyRule::absorb,
           bool strict = true);

  static const Taxonomy &default_taxonomy();

  /// Reads the JSON configuration documented in README.md.
  static Taxonomy from_json(std::string_view text);
  static Taxonomy load(const std::string &path);
  std::string to_json() const;

  const EntityTaxonomy &entities() const noexcept { return entities_; }
  const std::vector<std::string> &change_types() const noexcept {
    return change_types_;
  }
  bool has_change_type(std::string_view ct) const;
  bool is_valid(std::string_view ct, std::string_view et) const;
  MethodBodyRule method_body_rule() const noexcept { return method_body_rule_; }
  void set_method_body_rule(MethodBodyRule rule) { method_body_rule_ = rule; }
  bool strict() const noexcept { return strict_; }
  void set_strict(bool strict) { strict_ = strict; }

  /// CT: one feature per change type. CTET: one per valid combination, in
  /// change-type order then entity order.
  FeatureSpace feature_space(ChangeModel model) const;

  /// "statement insert" + "if_statement" -> "statement insert of if statement".
  std::string combined_label(std::string_view ct, std::string_view et) const;

private:
  EntityTaxonomy entities_;
  std::vector<std::string> change_types_;
  std::set<std::string, std::less<>> change_type_set_;
  std::map<std::string, std::vector<std::string>, std::less<>> combinations_;
  MethodBodyRule method_body_rule_;
  bool strict_;
};

/// Checks the combination against the taxonomy; throws UnknownFeature for an
/// invalid (ct, et) pair.
SourceCodeChange make_change(const Taxonomy &taxonomy, std::string ct,
                             std::string et, std::string path = {},
                             std::size_t line = 0);

/// Feature label of a change in the given space. In strict mode an invalid
/// combination or a label missing from the space raises UnknownFeature; in
/// permissive mode the label is returned regardless.
std::string project_to_feature(const SourceCodeChange &change,
                               const FeatureSpace &space,
                               const Taxonomy &taxonomy);

} // namespace repair_miner

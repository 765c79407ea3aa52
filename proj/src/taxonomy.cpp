#include "repair_miner/taxonomy.hpp"

#include "repair_miner/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace repair_miner {

using nlohmann::ordered_json;

std::string_view to_string(ChangeModel model) {
  return model == ChangeModel::ct ? "ct" : "ctet";
}

ChangeModel parse_change_model(std::string_view text) {
  if (text == "ct" || text == "CT")
    return ChangeModel::ct;
  if (text == "ctet" || text == "CTET")
    return ChangeModel::ctet;
  throw Error("unknown change model '" + std::string(text) +
              "' (expected ct or ctet)");
}

// ---------------------------------------------------------------------------
// FeatureSpace

FeatureSpace::FeatureSpace(ChangeModel model, std::vector<std::string> features)
    : model_(model) {
  for (auto &f : features)
    if (index_.count(f) == 0)
      extend(f);
    else
      throw TaxonomyError("duplicate feature '" + f + "'");
}

bool FeatureSpace::contains(std::string_view label) const {
  return index_.count(std::string(label)) > 0;
}

std::size_t FeatureSpace::index_of(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end())
    throw UnknownFeature("feature '" + std::string(label) +
                         "' is not part of the " +
                         std::string(to_string(model_)) + " feature space");
  return it->second;
}

std::size_t FeatureSpace::extend(const std::string &label) {
  auto [it, inserted] = index_.emplace(label, features_.size());
  if (inserted)
    features_.push_back(label);
  return it->second;
}

// ---------------------------------------------------------------------------
// Taxonomy

namespace {

Taxonomy make_default() {
  namespace c = change_type;
  std::vector<std::string> types;
  for (auto ct : {c::statement_insert,
                  c::statement_delete,
                  c::statement_update,
                  c::statement_parent_change,
                  c::statement_ordering_change,
                  c::condition_expression_change,
                  c::else_part_insert,
                  c::else_part_delete,
                  c::additional_functionality,
                  c::removed_functionality,
                  c::attribute_addition,
                  c::attribute_removal,
                  c::attribute_renaming,
                  c::attribute_type_change,
                  c::additional_class,
                  c::removed_class,
                  c::class_renaming,
                  c::method_renaming,
                  c::parameter_insert,
                  c::parameter_delete,
                  c::parameter_ordering_change,
                  c::parameter_renaming,
                  c::parameter_type_change,
                  c::return_type_insert,
                  c::return_type_delete,
                  c::return_type_change,
                  c::increasing_accessibility_change,
                  c::decreasing_accessibility_change,
                  c::addition_of_class_derivability,
                  c::removal_of_class_derivability,
                  c::addition_of_method_overridability,
                  c::removal_of_method_overridability,
                  c::addition_of_attribute_modifiability,
                  c::removal_of_attribute_modifiability,
                  c::parent_class_insert,
                  c::parent_class_delete,
                  c::parent_class_change,
                  c::parent_interface_insert,
                  c::parent_interface_delete,
                  c::parent_interface_change,
                  c::unclassified_change})
    types.emplace_back(ct);

  const auto &entities = EntityTaxonomy::default_taxonomy();
  std::vector<std::string> statements;
  for (const auto &k : entities.kinds())
    if (k.statement)
      statements.push_back(k.id);
  std::vector<std::string> updatable;
  for (const auto &s : statements)
    if (s != "try_statement" && s != "finally_clause")
      updatable.push_back(s);

  std::map<std::string, std::vector<std::string>> combos;
  auto add = [&](std::string_view ct, std::vector<std::string> ets) {
    combos[std::string(ct)] = std::move(ets);
  };
  add(c::statement_insert, statements);
  add(c::statement_delete, statements);
  add(c::statement_update, updatable);
  add(c::statement_parent_change, statements);
  add(c::statement_ordering_change, statements);
  add(c::condition_expression_change,
      {"if_statement", "while_statement", "for_statement"});
  add(c::else_part_insert, {"else_statement"});
  add(c::else_part_delete, {"else_statement"});
  add(c::additional_functionality, {"method"});
  add(c::removed_functionality, {"method"});
  add(c::attribute_addition, {"attribute"});
  add(c::attribute_removal, {"attribute"});
  add(c::attribute_renaming, {"attribute"});
  add(c::attribute_type_change, {"attribute"});
  add(c::additional_class, {"class"});
  add(c::removed_class, {"class"});
  add(c::class_renaming, {"class"});
  add(c::method_renaming, {"method"});
  for (auto ct : {c::parameter_insert, c::parameter_delete,
                  c::parameter_ordering_change, c::parameter_renaming,
                  c::parameter_type_change})
    add(ct, {"parameter"});
  for (auto ct :
       {c::return_type_insert, c::return_type_delete, c::return_type_change})
    add(ct, {"return_type"});
  add(c::increasing_accessibility_change, {"class", "method", "attribute"});
  add(c::decreasing_accessibility_change, {"class", "method", "attribute"});
  add(c::addition_of_class_derivability, {"class"});
  add(c::removal_of_class_derivability, {"class"});
  add(c::addition_of_method_overridability, {"method"});
  add(c::removal_of_method_overridability, {"method"});
  add(c::addition_of_attribute_modifiability, {"attribute"});
  add(c::removal_of_attribute_modifiability, {"attribute"});
  for (auto ct :
       {c::parent_class_insert, c::parent_class_delete, c::parent_class_change})
    add(ct, {"parent_class"});
  for (auto ct : {c::parent_interface_insert, c::parent_interface_delete,
                  c::parent_interface_change})
    add(ct, {"parent_interface"});
  add(c::unclassified_change, {"attribute"});

  return Taxonomy(entities, std::move(types), std::move(combos));
}

} // namespace

Taxonomy::Taxonomy(EntityTaxonomy entities, std::vector<std::string> change_types,
                   std::map<std::string, std::vector<std::string>> valid_combinations,
                   MethodBodyRule method_body_rule, bool strict)
    : entities_(std::move(entities)), change_types_(std::move(change_types)),
      method_body_rule_(method_body_rule), strict_(strict) {
  for (const auto &ct : change_types_)
    if (!change_type_set_.insert(ct).second)
      throw TaxonomyError("duplicate change type '" + ct + "'");
  for (auto &[ct, ets] : valid_combinations) {
    if (!has_change_type(ct))
      throw TaxonomyError("combination table names unknown change type '" + ct +
                          "'");
    for (const auto &et : ets)
      if (!entities_.contains(et))
        throw TaxonomyError("combination table names unknown entity kind '" +
                            et + "'");
    combinations_.emplace(ct, std::move(ets));
  }
}

const Taxonomy &Taxonomy::default_taxonomy() {
  static const Taxonomy taxonomy = make_default();
  return taxonomy;
}

bool Taxonomy::has_change_type(std::string_view ct) const {
  return change_type_set_.count(ct) > 0;
}

bool Taxonomy::is_valid(std::string_view ct, std::string_view et) const {
  auto it = combinations_.find(ct);
  if (it == combinations_.end())
    return false;
  return std::find(it->second.begin(), it->second.end(), et) != it->second.end();
}

FeatureSpace Taxonomy::feature_space(ChangeModel model) const {
  if (model == ChangeModel::ct)
    return FeatureSpace(model, change_types_);
  std::vector<std::string> features;
  for (const auto &ct : change_types_) {
    auto it = combinations_.find(ct);
    if (it == combinations_.end())
      continue;
    for (const auto &kind : entities_.kinds())
      if (std::find(it->second.begin(), it->second.end(), kind.id) != it->second.end())
        features.push_back(combined_label(ct, kind.id));
  }
  return FeatureSpace(model, std::move(features));
}

std::string Taxonomy::combined_label(std::string_view ct,
                                     std::string_view et) const {
  const std::string &label =
      entities_.contains(et) ? entities_.label(et) : std::string(et);
  return std::string(ct) + " of " + label;
}

Taxonomy Taxonomy::from_json(std::string_view text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error &e) {
    throw TaxonomyError(std::string("malformed taxonomy file: ") + e.what());
  }
  try {
    std::vector<EntityKind> kinds;
    for (const auto &k : doc.at("entity_kinds"))
      kinds.push_back(EntityKind{k.at("id").get<std::string>(),
                                 k.at("label").get<std::string>(),
                                 k.value("statement", false),
                                 k.value("root", false)});
    std::map<std::string, std::string> mapping;
    if (doc.contains("parser_mapping"))
      for (auto &[from, to] : doc.at("parser_mapping").items())
        mapping[from] = to.get<std::string>();
    auto types = doc.at("change_types").get<std::vector<std::string>>();
    std::map<std::string, std::vector<std::string>> combos;
    for (auto &[ct, ets] : doc.at("valid_combinations").items())
      combos[ct] = ets.get<std::vector<std::string>>();
    MethodBodyRule rule = MethodBodyRule::absorb;
    const auto rule_text = doc.value("method_body_rule", "absorb");
    if (rule_text == "count")
      rule = MethodBodyRule::count;
    else if (rule_text != "absorb")
      throw TaxonomyError("method_body_rule must be 'absorb' or 'count'");
    return Taxonomy(EntityTaxonomy(std::move(kinds), std::move(mapping)),
                    std::move(types), std::move(combos), rule,
                    doc.value("strict", true));
  } catch (const nlohmann::json::exception &e) {
    throw TaxonomyError(std::string("invalid taxonomy file: ") + e.what());
  }
}

Taxonomy Taxonomy::load(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw TaxonomyError("cannot read taxonomy file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

std::string Taxonomy::to_json() const {
  ordered_json doc;
  auto kinds = ordered_json::array();
  for (const auto &k : entities_.kinds())
    kinds.push_back(ordered_json{{"id", k.id},
                                 {"label", k.label},
                                 {"statement", k.statement},
                                 {"root", k.root}});
  doc["entity_kinds"] = std::move(kinds);
  doc["parser_mapping"] = ordered_json::object();
  for (const auto &[from, to] : entities_.parser_mapping())
    doc["parser_mapping"][from] = to;
  doc["change_types"] = change_types_;
  doc["valid_combinations"] = ordered_json::object();
  for (const auto &ct : change_types_)
    if (auto it = combinations_.find(ct); it != combinations_.end())
      doc["valid_combinations"][ct] = it->second;
  doc["method_body_rule"] =
      method_body_rule_ == MethodBodyRule::absorb ? "absorb" : "count";
  doc["strict"] = strict_;
  return doc.dump(2) + "\n";
}

SourceCodeChange make_change(const Taxonomy &taxonomy, std::string ct,
                             std::string et, std::string path, std::size_t line) {
  if (!taxonomy.is_valid(ct, et))
    throw UnknownFeature("invalid combination (" + ct + ", " + et + ")");
  return SourceCodeChange{std::move(ct), std::move(et), std::move(path), line};
}

std::string project_to_feature(const SourceCodeChange &change,
                               const FeatureSpace &space,
                               const Taxonomy &taxonomy) {
  std::string label = space.model() == ChangeModel::ct
                          ? change.ct
                          : taxonomy.combined_label(change.ct, change.et);
  if (taxonomy.strict()) {
    if (!taxonomy.is_valid(change.ct, change.et))
      throw UnknownFeature("invalid combination (" + change.ct + ", " +
                           change.et + ")");
    if (!space.contains(label))
      throw UnknownFeature("feature '" + label + "' is not part of the space");
  }
  return label;
}

} // namespace repair_miner

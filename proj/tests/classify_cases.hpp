#pragma once
// Handcrafted before/after pairs (tests/data/classify/<name>.{before,after}.java)
// with their classification worked out by hand.

#include <string>
#include <utility>
#include <vector>

namespace support {

struct ClassifyCase {
  std::string name;
  std::vector<std::pair<std::string, std::string>> expected; // (ct, et)
};

inline const std::vector<ClassifyCase> &classify_cases() {
  static const std::vector<ClassifyCase> cases = {
      {"listing", {{"statement update", "assignment"}}},
      {"formatting", {}},
      {"stmt_insert", {{"statement insert", "method_invocation"}}},
      {"stmt_delete", {{"statement delete", "method_invocation"}}},
      {"cond_change", {{"condition expression change", "while_statement"}}},
      {"if_insert",
       {{"statement insert", "if_statement"}, {"statement insert", "method_invocation"}}},
      {"else_insert",
       {{"else-part insert", "else_statement"}, {"statement insert", "assignment"}}},
      {"method_add", {{"additional functionality", "method"}}},
      {"method_remove", {{"removed functionality", "method"}}},
      {"attr_add", {{"attribute addition", "attribute"}}},
      {"attr_type", {{"attribute type change", "attribute"}}},
      {"method_rename", {{"method renaming", "method"}}},
      {"param_insert", {{"parameter insert", "parameter"}}},
      {"param_type", {{"parameter type change", "parameter"}}},
      {"access_up", {{"increasing accessibility change", "attribute"}}},
      {"final_attr", {{"addition of attribute modifiability", "attribute"}}},
      {"parent_change", {{"statement parent change", "assignment"}}},
      {"ordering", {{"statement ordering change", "assignment"}}},
      {"parent_class", {{"parent class insert", "parent_class"}}},
      {"return_type", {{"return type change", "return_type"}}},
  };
  return cases;
}

} // namespace support

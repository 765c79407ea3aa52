#pragma once

#include "repair_miner/tree.hpp"

#include <json.hpp>

#include <string>
#include <string_view>

namespace repair_miner {

// Tree interchange format: a UTF-8 JSON document holding one node record
//   {"kind": str, "value": str?, "range": [l0, c0, l1, c1], "children": [...]}
// The root record may additionally carry "origin": {"path", "revision"}.

SourceTree parse_interchange(std::string_view text,
                             const EntityTaxonomy &taxonomy =
                                 EntityTaxonomy::default_taxonomy());

/// Deterministic: fixed key order, two-space indentation, trailing newline.
std::string serialize_interchange(const SourceTree &tree);

// Record-level access for formats that embed trees (the corpus file).
SourceTree tree_from_json(const nlohmann::ordered_json &doc,
                          const EntityTaxonomy &taxonomy =
                              EntityTaxonomy::default_taxonomy());
nlohmann::ordered_json tree_to_json(const SourceTree &tree);

} // namespace repair_miner

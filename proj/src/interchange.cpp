#include "repair_miner/interchange.hpp"

#include "repair_miner/errors.hpp"

#include <algorithm>

namespace repair_miner {

using nlohmann::ordered_json;

namespace {

const ordered_json &require(const ordered_json &obj, const char *field,
                            const std::string &path) {
  auto it = obj.find(field);
  if (it == obj.end())
    throw SchemaError("missing field '" + std::string(field) + "' at " +
                      (path.empty() ? "/" : path));
  return *it;
}

std::size_t to_position(const ordered_json &v, const std::string &path) {
  if (!v.is_number_unsigned() || v.get<std::size_t>() == 0)
    throw SchemaError("range entries must be positive integers at " + path);
  return v.get<std::size_t>();
}

TreeNode node_from_json(const ordered_json &obj, const std::string &path) {
  if (!obj.is_object())
    throw SchemaError("expected a node record at " + (path.empty() ? "/" : path));
  TreeNode node;
  const auto &kind = require(obj, "kind", path);
  if (!kind.is_string())
    throw SchemaError("'kind' must be a string at " + path);
  node.kind = kind.get<std::string>();
  if (auto it = obj.find("value"); it != obj.end() && !it->is_null()) {
    if (!it->is_string())
      throw SchemaError("'value' must be a string at " + path);
    node.value = it->get<std::string>();
  }
  const auto &range = require(obj, "range", path);
  if (!range.is_array() || range.size() != 4)
    throw SchemaError("'range' must hold four integers at " + path);
  node.range = SourceRange{to_position(range[0], path), to_position(range[1], path),
                           to_position(range[2], path), to_position(range[3], path)};
  if (auto it = obj.find("children"); it != obj.end()) {
    if (!it->is_array())
      throw SchemaError("'children' must be an array at " + path);
    node.children.reserve(it->size());
    for (std::size_t i = 0; i < it->size(); ++i)
      node.children.push_back(
          node_from_json((*it)[i], path + "/children/" + std::to_string(i)));
  }
  return node;
}

ordered_json node_to_json(const TreeNode &node) {
  ordered_json obj;
  obj["kind"] = node.kind;
  if (!node.value.empty())
    obj["value"] = node.value;
  obj["range"] = {node.range.start_line, node.range.start_column,
                  node.range.end_line, node.range.end_column};
  auto children = ordered_json::array();
  for (const auto &c : node.children)
    children.push_back(node_to_json(c));
  obj["children"] = std::move(children);
  return obj;
}

} // namespace

SourceTree tree_from_json(const ordered_json &doc,
                          const EntityTaxonomy &taxonomy) {
  SourceTree tree;
  tree.root = node_from_json(doc, "");
  if (auto it = doc.find("origin"); it != doc.end() && it->is_object()) {
    tree.path = it->value("path", "");
    tree.revision = it->value("revision", "");
  }
  validate(tree, taxonomy);
  return tree;
}

ordered_json tree_to_json(const SourceTree &tree) {
  ordered_json doc;
  if (!tree.path.empty() || !tree.revision.empty())
    doc["origin"] = {{"path", tree.path}, {"revision", tree.revision}};
  auto root = node_to_json(tree.root);
  for (auto &[key, value] : root.items())
    doc[key] = std::move(value);
  return doc;
}

SourceTree parse_interchange(std::string_view text,
                             const EntityTaxonomy &taxonomy) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error &e) {
    // e.byte is the 1-based offset of the offending character.
    const std::size_t offset =
        std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i < offset; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ParseError("malformed interchange document", line, column);
  }
  return tree_from_json(doc, taxonomy);
}

std::string serialize_interchange(const SourceTree &tree) {
  return tree_to_json(tree).dump(2) + "\n";
}

} // namespace repair_miner

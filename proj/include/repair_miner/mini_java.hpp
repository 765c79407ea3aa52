#pragma once

#include "repair_miner/tree.hpp"

#include <string_view>

namespace repair_miner {

/// Parses the supported Java subset into a SourceTree.
///
/// Supported: package/import headers (ignored), classes with extends/
/// implements, nested classes, fields, methods and constructors, and the
/// statements if/else, while, for (classic and enhanced), return, throw,
/// break, continue, try/catch/finally, local variable declarations and the
/// expression statements assignment, method invocation, instance creation
/// and ++/--. Annotations and comments are skipped.
///
/// Tree shape: a method node has value = its name and children
/// [modifier*, return_type?, parameter*, statement*]; control statements
/// carry their condition (or for-header) as value and their body statements
/// as children, an else branch being an else_statement child. Statement
/// values are token text joined by a fixed spacing rule, so formatting does
/// not influence them.
///
/// Throws UnsupportedConstruct for constructs outside the subset and
/// ParseError for lexical or syntax errors.
SourceTree parse_mini_java(std::string_view source,
                           const EntityTaxonomy &taxonomy =
                               EntityTaxonomy::default_taxonomy());

} // namespace repair_miner

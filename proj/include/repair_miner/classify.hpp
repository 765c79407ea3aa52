#pragma once

#include "repair_miner/differ.hpp"
#include "repair_miner/taxonomy.hpp"

#include <string>
#include <vector>

namespace repair_miner {

struct DroppedOperation {
  std::size_t index; // position in the classified script
  std::string reason;
};

struct Classification {
  std::vector<SourceCodeChange> changes;
  std::vector<DroppedOperation> dropped;
};

/// Maps each edit operation to exactly one SourceCodeChange or records why it
/// was dropped, so that changes.size() + dropped.size() == ops.size().
/// In strict taxonomy mode an operation without an applicable rule raises
/// UnclassifiableChange; otherwise it is dropped.
Classification classify(const std::vector<EditOperation> &ops,
                        const Taxonomy &taxonomy,
                        const std::string &path = {});

/// Convenience pipeline: match, diff and classify one file pair.
Classification diff_and_classify(const SourceTree &before,
                                 const SourceTree &after,
                                 const Taxonomy &taxonomy,
                                 const std::string &path = {});

} // namespace repair_miner

#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "ranger/graph.hpp"

namespace ranger {

class CorruptStream : public std::runtime_error {
  public:
    explicit CorruptStream(const std::string& what) : std::runtime_error(what) {}
};

// JSONL graph format: a header line {"t":"h",...} with format version and
// embedding dimension, then one {"t":"n",...} line per node (ascending id)
// and one {"t":"e",...} line per edge (sorted by src, kind, dst). Output is
// byte-deterministic for a given graph.
void serialize(const CodeGraph& graph, std::ostream& out);
std::string serialize(const CodeGraph& graph);
void save_graph(const CodeGraph& graph, const std::filesystem::path& path);

CodeGraph deserialize(std::istream& in);
CodeGraph deserialize(const std::string& data);
CodeGraph load_graph(const std::filesystem::path& path);

}  // namespace ranger

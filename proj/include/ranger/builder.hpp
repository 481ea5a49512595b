#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ranger/extract.hpp"
#include "ranger/graph.hpp"
#include "ranger/source.hpp"

namespace ranger {

class DuplicateQualifiedName : public std::runtime_error {
  public:
    explicit DuplicateQualifiedName(const std::string& what) : std::runtime_error(what) {}
};

struct ResolutionReport {
    struct Unresolved {
        std::string name;
        std::string module;
        std::string importer;
    };
    std::size_t resolved = 0;
    std::vector<Unresolved> unresolved;

    nlohmann::ordered_json to_json() const;
};

// Stage 1 ingestion: one Repo node, per-file entities and intra-file
// relations, temporary Import nodes, USES/INHERITS edges into them.
CodeGraph ingest(std::span<const FileTransfer> transfers, std::string_view repo_name);

// Stage 2 consolidation: match every Import node to its entity, redirect
// incoming edges, delete the Import nodes. Ambiguity and misses become report
// entries, never errors.
ResolutionReport resolve_imports(CodeGraph& graph);

struct BuildOptions {
    ScanOptions scan;
};

struct BuildResult {
    CodeGraph graph;  // frozen
    ResolutionReport report;
    std::vector<std::string> diagnostics;
};

BuildResult build(const std::filesystem::path& root, std::string_view repo_name,
                  const BuildOptions& options = {});

}  // namespace ranger

#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "ranger/grammar.hpp"
#include "ranger/source.hpp"

namespace ranger {

class UndecodableFile : public std::runtime_error {
  public:
    explicit UndecodableFile(const std::string& what) : std::runtime_error(what) {}
};

class RootNotFound : public std::runtime_error {
  public:
    explicit RootNotFound(const std::string& what) : std::runtime_error(what) {}
};

// Stage 1, per file: parse to a concrete syntax tree. Parse errors yield
// error-marked subtrees, never a failure; only undecodable bytes throw.
SyntaxTree parse_file(const SourceFile& file, const Grammar& grammar);

// Walk the tree into the decoupled transfer record: entities, intra-file
// relations, imports, and unresolved name references.
FileTransfer extract_entities(const SyntaxTree& tree, const SourceFile& file);

struct ScanOptions {
    std::vector<std::string> include;  // empty = all *.py files
    std::vector<std::string> exclude;
};

struct ScanResult {
    std::vector<FileTransfer> transfers;  // ordered lexicographically by path
    std::vector<std::string> diagnostics;
};

ScanResult scan_repository(const std::filesystem::path& root, const ScanOptions& options = {});

}  // namespace ranger

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ranger/graph.hpp"

namespace ranger {

struct SourceFile {
    std::string path;         // repository-relative, '/'-separated
    std::string module_name;  // dotted module name derived from path
    std::string text;
};

// Dotted module name for a repository-relative path:
// "a/b/c.py" -> "a.b.c", "a/b/__init__.py" -> "a.b".
std::string module_name_for_path(std::string_view rel_path);

struct Span {
    int start = 0;  // 1-based line numbers, inclusive
    int end = 0;
};

// Text slice covered by a line span: from the start of line `start` to the
// end of line `end`, without the trailing newline.
std::string slice_lines(std::string_view text, Span span);

struct EntityRecord {
    NodeKind kind = NodeKind::Module;  // Module..GlobalVariable (never Repo/Import)
    std::string name;
    std::string signature;
    std::string code;
    std::string module_name;
    std::string class_name;  // Method/Field only
    Span span;
    std::string qualified;   // module-rooted dotted path; (kind, qualified) is unique per file

    std::string key() const { return std::string(to_string(kind)) + ":" + qualified; }
};

struct ImportRecord {
    std::string name;    // imported symbol; "*" for star imports; dotted path for plain imports
    std::string module;  // source module string as written (leading dots = relative)
    std::string alias;
    std::string dotted_folder_name;  // package prefix of `module`, when nested

    // Name the import binds in the file scope: the alias when present,
    // otherwise the symbol (head package for plain imports).
    std::string binding() const;
    bool is_star() const { return name == "*"; }
    bool is_plain() const { return !name.empty() && name == module; }
};

enum class RefKind { Uses, Inherits };

struct Relation {
    std::string src_key;
    EdgeKind kind = EdgeKind::Uses;
    std::string dst_key;
};

struct UsesRef {
    std::string src_key;
    std::string name;  // may be dotted for inheritance from an imported module attribute
    RefKind kind = RefKind::Uses;
};

// Per-file decoupled transfer record: everything graph ingestion needs,
// nothing language-specific.
struct FileTransfer {
    SourceFile source;  // text is not serialized; entities carry their slices
    std::vector<EntityRecord> entities;
    std::vector<Relation> relations;
    std::vector<ImportRecord> imports;
    std::vector<UsesRef> uses_refs;

    nlohmann::ordered_json to_json() const;
    static FileTransfer from_json(const nlohmann::json& j);
};

}  // namespace ranger

#include "ranger/extract.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <unordered_set>

#include "ranger/text.hpp"

namespace ranger {

namespace {

const std::unordered_set<std::string_view> kPyKeywords = {
    "False", "None",   "True",  "and",    "as",     "assert", "async",  "await",
    "break", "class",  "continue", "def", "del",    "elif",   "else",   "except",
    "finally", "for",  "from",  "global", "if",     "import", "in",     "is",
    "lambda", "nonlocal", "not", "or",    "pass",   "raise",  "return", "try",
    "while", "with",   "yield", "self",   "cls",    "match",  "case",
};

bool is_plain_identifier(std::string_view s) {
    if (s.empty()) return false;
    if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    }
    return true;
}

bool is_dotted_identifier(std::string_view s) {
    std::size_t start = 0;
    while (start <= s.size()) {
        std::size_t dot = s.find('.', start);
        std::string_view part = s.substr(start, dot == std::string_view::npos ? s.size() - start
                                                                              : dot - start);
        if (!is_plain_identifier(part)) return false;
        if (dot == std::string_view::npos) return true;
        start = dot + 1;
    }
    return false;
}

// Head of a base-class expression: the longest leading dotted-name prefix
// ("pkg.Base[T]" -> "pkg.Base"). Empty when the expression starts elsewhere.
std::string dotted_head(std::string_view s) {
    std::size_t i = 0;
    std::string out;
    while (i < s.size()) {
        std::size_t b = i;
        if (!(std::isalpha(static_cast<unsigned char>(s[i])) || s[i] == '_')) break;
        while (i < s.size() &&
               (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) {
            ++i;
        }
        if (!out.empty()) out += '.';
        out.append(s.substr(b, i - b));
        if (i < s.size() && s[i] == '.') {
            ++i;
            continue;
        }
        break;
    }
    return out;
}

std::string rtrim(std::string s) {
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\n' ||
                          s.back() == '\r' || s.back() == '\\')) {
        s.pop_back();
    }
    return s;
}

enum class ScopeKind { ModuleScope, ClassScope, FunctionScope };

struct Ent {
    EntityRecord rec;
    int parent = -1;
    std::set<std::string> loads;
    std::set<std::string> stores;
    std::vector<std::string> inherit_refs;  // unresolved base-class expressions
};

class Extractor {
  public:
    Extractor(const SyntaxTree& tree, const SourceFile& file) : tree_(tree), file_(file) {}

    FileTransfer run() {
        Ent module;
        module.rec.kind = NodeKind::Module;
        module.rec.name = file_.module_name;
        module.rec.module_name = file_.module_name;
        module.rec.qualified = file_.module_name;
        module.rec.span = {1, std::max(1, tree_.root.end_line)};
        module.rec.code = slice_lines(file_.text, module.rec.span);
        ents_.push_back(std::move(module));
        key_index_[ents_[0].rec.key()] = 0;

        walk(tree_.root.children, 0, ScopeKind::ModuleScope, file_.module_name);
        return assemble();
    }

  private:
    const SyntaxTree& tree_;
    const SourceFile& file_;
    std::vector<Ent> ents_;
    std::map<std::string, std::size_t> key_index_;
    std::vector<ImportRecord> imports_;
    std::set<std::string> seen_imports_;

    const Token& tok(std::size_t i) const { return tree_.tokens[i]; }

    std::size_t upsert(Ent ent) {
        const std::string key = ent.rec.key();
        auto it = key_index_.find(key);
        if (it != key_index_.end()) {
            ents_[it->second] = std::move(ent);  // last definition wins
            return it->second;
        }
        ents_.push_back(std::move(ent));
        key_index_[key] = ents_.size() - 1;
        return ents_.size() - 1;
    }

    void add_import(ImportRecord rec) {
        std::string fingerprint = rec.name + "\x1f" + rec.module + "\x1f" + rec.alias;
        if (!seen_imports_.insert(fingerprint).second) return;
        std::string mod = rec.module;
        std::size_t dots = 0;
        while (dots < mod.size() && mod[dots] == '.') ++dots;
        std::string_view flat(mod);
        flat.remove_prefix(dots);
        auto last_dot = flat.rfind('.');
        if (last_dot != std::string_view::npos) {
            rec.dotted_folder_name = std::string(flat.substr(0, last_dot));
        }
        imports_.push_back(std::move(rec));
    }

    void walk(const std::vector<CstNode>& stmts, std::size_t scope_ent, ScopeKind scope,
              const std::string& qual_prefix) {
        for (const CstNode& stmt : stmts) {
            switch (stmt.kind) {
                case CstKind::ClassDef:
                    handle_class(stmt, scope_ent, qual_prefix);
                    break;
                case CstKind::FunctionDef:
                    handle_function(stmt, scope_ent, scope, qual_prefix);
                    break;
                case CstKind::Assign:
                    handle_assign(stmt, scope_ent, scope, qual_prefix);
                    break;
                case CstKind::Import:
                case CstKind::ImportFrom:
                    for (const ImportItem& item : stmt.imports) {
                        ImportRecord rec;
                        rec.name = item.name;
                        rec.module = item.module;
                        rec.alias = item.alias;
                        add_import(rec);
                    }
                    break;
                case CstKind::Block:
                    // Header tokens (condition, loop targets) belong to the
                    // enclosing entity; children stay in the same scope.
                    if (scope != ScopeKind::ModuleScope) {
                        collect_refs(stmt.tok_begin, stmt.body_tok_begin, ents_[scope_ent]);
                    }
                    walk(stmt.children, scope_ent, scope, qual_prefix);
                    break;
                case CstKind::Statement:
                    if (scope != ScopeKind::ModuleScope) {
                        collect_refs(stmt.tok_begin, stmt.tok_end, ents_[scope_ent]);
                    }
                    break;
                case CstKind::Error:
                case CstKind::Module:
                    break;
            }
        }
    }

    void handle_class(const CstNode& stmt, std::size_t scope_ent,
                      const std::string& qual_prefix) {
        Ent ent;
        ent.rec.kind = NodeKind::Class;
        ent.rec.name = stmt.name;
        ent.rec.module_name = file_.module_name;
        ent.rec.qualified = qual_prefix + "." + stmt.name;
        ent.rec.span = {stmt.start_line, stmt.end_line};
        ent.rec.code = slice_lines(file_.text, ent.rec.span);
        ent.rec.signature =
            rtrim(std::string(file_.text.substr(stmt.sig_begin, stmt.sig_end - stmt.sig_begin)));
        ent.parent = static_cast<int>(scope_ent);
        for (const std::string& base : stmt.bases) {
            if (std::find(ent.inherit_refs.begin(), ent.inherit_refs.end(), base) ==
                ent.inherit_refs.end()) {
                ent.inherit_refs.push_back(base);
            }
        }
        std::size_t idx = upsert(std::move(ent));
        // Decorator tokens reference enclosing-scope names.
        collect_refs(stmt.tok_begin, stmt.header_tok_begin, ents_[idx]);
        walk(stmt.children, idx, ScopeKind::ClassScope, qual_prefix + "." + stmt.name);
    }

    void handle_function(const CstNode& stmt, std::size_t scope_ent, ScopeKind scope,
                         const std::string& qual_prefix) {
        Ent ent;
        const bool is_method = scope == ScopeKind::ClassScope;
        ent.rec.kind = is_method ? NodeKind::Method : NodeKind::Function;
        ent.rec.name = stmt.name;
        ent.rec.module_name = file_.module_name;
        if (is_method) ent.rec.class_name = ents_[scope_ent].rec.name;
        ent.rec.qualified = qual_prefix + "." + stmt.name;
        ent.rec.span = {stmt.start_line, stmt.end_line};
        ent.rec.code = slice_lines(file_.text, ent.rec.span);
        ent.rec.signature =
            rtrim(std::string(file_.text.substr(stmt.sig_begin, stmt.sig_end - stmt.sig_begin)));
        ent.parent = static_cast<int>(scope_ent);
        for (const std::string& p : stmt.params) ent.stores.insert(p);
        std::size_t idx = upsert(std::move(ent));
        // Decorators, parameter defaults, and annotations.
        collect_refs(stmt.tok_begin, stmt.body_tok_begin, ents_[idx]);
        walk(stmt.children, idx, ScopeKind::FunctionScope, qual_prefix + "." + stmt.name);
    }

    void handle_assign(const CstNode& stmt, std::size_t scope_ent, ScopeKind scope,
                       const std::string& qual_prefix) {
        if (scope == ScopeKind::FunctionScope) {
            Ent& owner = ents_[scope_ent];
            for (const std::string& t : stmt.targets) owner.stores.insert(t);
            collect_refs(stmt.tok_begin, stmt.tok_end, owner);
            return;
        }
        const NodeKind kind =
            scope == ScopeKind::ModuleScope ? NodeKind::GlobalVariable : NodeKind::Field;
        for (const std::string& target : stmt.targets) {
            Ent ent;
            ent.rec.kind = kind;
            ent.rec.name = target;
            ent.rec.module_name = file_.module_name;
            if (kind == NodeKind::Field) ent.rec.class_name = ents_[scope_ent].rec.name;
            ent.rec.qualified = qual_prefix + "." + target;
            ent.rec.span = {stmt.start_line, stmt.end_line};
            ent.rec.code = slice_lines(file_.text, ent.rec.span);
            ent.parent = static_cast<int>(scope_ent);
            ent.stores.insert(target);
            std::size_t idx = upsert(std::move(ent));
            if (kind == NodeKind::GlobalVariable) {
                collect_refs(stmt.tok_begin, stmt.tok_end, ents_[idx]);
            }
        }
    }

    // Scan a token range for loaded and stored names. Attribute accesses keep
    // only their head; keyword arguments, loop targets, `as` bindings and
    // walrus targets are recognized positionally.
    void collect_refs(std::size_t begin, std::size_t end, Ent& ent) {
        int depth = 0;
        int for_depth = -1;  // bracket depth of an active for-target region
        int lambda_depth = -1;
        for (std::size_t p = begin; p < end && p < tree_.tokens.size(); ++p) {
            const Token& t = tok(p);
            if (t.kind == TokKind::Op) {
                if (t.text == "(" || t.text == "[" || t.text == "{") ++depth;
                if (t.text == ")" || t.text == "]" || t.text == "}") --depth;
                if (t.text == ":" && depth == lambda_depth) lambda_depth = -1;
                continue;
            }
            if (t.kind != TokKind::Name) continue;
            if (t.text == "for") {
                for_depth = depth;
                continue;
            }
            if (t.text == "in" && for_depth == depth) {
                for_depth = -1;
                continue;
            }
            if (t.text == "lambda") {
                lambda_depth = depth;
                continue;
            }
            if (kPyKeywords.contains(t.text)) continue;

            const Token* prev = nullptr;
            for (std::size_t q = p; q > begin; --q) {
                const Token& c = tok(q - 1);
                if (c.kind == TokKind::Newline || c.kind == TokKind::Indent ||
                    c.kind == TokKind::Dedent) {
                    continue;
                }
                prev = &c;
                break;
            }
            const Token* next = p + 1 < end ? &tok(p + 1) : nullptr;

            if (prev && prev->kind == TokKind::Op && prev->text == ".") continue;
            if (prev && prev->kind == TokKind::Name &&
                (prev->text == "def" || prev->text == "class")) {
                continue;
            }
            if (prev && prev->kind == TokKind::Name && prev->text == "as") {
                ent.stores.insert(t.text);
                continue;
            }
            if (prev && prev->kind == TokKind::Name && prev->text == "del") {
                ent.stores.insert(t.text);
                continue;
            }
            if (next && next->kind == TokKind::Op && next->text == ":=") {
                ent.stores.insert(t.text);
                continue;
            }
            if (next && next->kind == TokKind::Op && next->text == "=" && depth > 0 && prev &&
                prev->kind == TokKind::Op && (prev->text == "(" || prev->text == ",")) {
                continue;  // keyword argument name
            }
            if (for_depth == depth && for_depth >= 0) {
                ent.stores.insert(t.text);
                continue;
            }
            if (lambda_depth == depth && prev && prev->kind == TokKind::Op &&
                prev->text == ",") {
                ent.stores.insert(t.text);
                continue;
            }
            if (lambda_depth >= 0 && prev && prev->kind == TokKind::Name &&
                prev->text == "lambda") {
                ent.stores.insert(t.text);
                continue;
            }
            if (lambda_depth == depth && next && next->kind == TokKind::Op &&
                (next->text == ":" || next->text == ",")) {
                ent.stores.insert(t.text);
                continue;
            }
            ent.loads.insert(t.text);
        }
    }

    FileTransfer assemble() {
        FileTransfer transfer;
        transfer.source.path = file_.path;
        transfer.source.module_name = file_.module_name;

        // Names visible at module scope (in-file USES/INHERITS targets).
        std::map<std::string, std::size_t> module_scope;  // name -> entity index
        for (std::size_t i = 1; i < ents_.size(); ++i) {
            const Ent& e = ents_[i];
            if (e.parent == 0 && (e.rec.kind == NodeKind::Class ||
                                  e.rec.kind == NodeKind::Function ||
                                  e.rec.kind == NodeKind::GlobalVariable)) {
                module_scope[e.rec.name] = i;
            }
        }
        std::map<std::string, std::size_t> module_scope_classes;
        for (const auto& [name, idx] : module_scope) {
            if (ents_[idx].rec.kind == NodeKind::Class) module_scope_classes[name] = idx;
        }

        std::set<std::array<std::string, 3>> relation_set;
        auto add_relation = [&](const std::string& src, EdgeKind kind, const std::string& dst) {
            if (src == dst) return;
            if (relation_set.insert({src, std::string(to_string(kind)), dst}).second) {
                transfer.relations.push_back({src, kind, dst});
            }
        };

        // Hierarchy relations.
        for (std::size_t i = 1; i < ents_.size(); ++i) {
            const Ent& e = ents_[i];
            const Ent& parent = ents_[static_cast<std::size_t>(e.parent)];
            EdgeKind kind = EdgeKind::Contains;
            if (e.rec.kind == NodeKind::Method) kind = EdgeKind::HasMethod;
            if (e.rec.kind == NodeKind::Field) kind = EdgeKind::HasField;
            add_relation(parent.rec.key(), kind, e.rec.key());
        }

        std::set<std::array<std::string, 3>> ref_set;
        auto add_ref = [&](const std::string& src, const std::string& name, RefKind kind) {
            const char* k = kind == RefKind::Uses ? "u" : "i";
            if (ref_set.insert({src, name, k}).second) {
                transfer.uses_refs.push_back({src, name, kind});
            }
        };

        // USES relations and unresolved references.
        for (std::size_t i = 1; i < ents_.size(); ++i) {
            const Ent& e = ents_[i];
            const bool uses_source =
                e.rec.kind == NodeKind::Class || e.rec.kind == NodeKind::Function ||
                e.rec.kind == NodeKind::Method || e.rec.kind == NodeKind::GlobalVariable;
            if (uses_source) {
                for (const std::string& name : e.loads) {
                    if (e.stores.contains(name) || name == e.rec.name) continue;
                    auto hit = module_scope.find(name);
                    if (hit != module_scope.end() && hit->second != i) {
                        add_relation(e.rec.key(), EdgeKind::Uses, ents_[hit->second].rec.key());
                    } else if (hit == module_scope.end()) {
                        add_ref(e.rec.key(), name, RefKind::Uses);
                    }
                }
            }
            if (e.rec.kind == NodeKind::Class) {
                for (const std::string& base : e.inherit_refs) {
                    std::string head = dotted_head(base);
                    if (head.empty()) continue;
                    if (is_plain_identifier(head) && head == e.rec.name) continue;
                    auto hit = module_scope_classes.find(head);
                    if (is_plain_identifier(head) && hit != module_scope_classes.end() &&
                        hit->second != i) {
                        add_relation(e.rec.key(), EdgeKind::Inherits,
                                     ents_[hit->second].rec.key());
                    } else if (is_dotted_identifier(head)) {
                        add_ref(e.rec.key(), head, RefKind::Inherits);
                    }
                }
            }
        }

        for (Ent& e : ents_) transfer.entities.push_back(std::move(e.rec));
        transfer.imports = std::move(imports_);
        return transfer;
    }
};

}  // namespace

SyntaxTree parse_file(const SourceFile& file, const Grammar& grammar) {
    if (!is_valid_utf8(file.text)) {
        throw UndecodableFile(file.path + ": not valid UTF-8");
    }
    return grammar.parse(file.text);
}

FileTransfer extract_entities(const SyntaxTree& tree, const SourceFile& file) {
    Extractor extractor(tree, file);
    return extractor.run();
}

ScanResult scan_repository(const std::filesystem::path& root, const ScanOptions& options) {
    namespace fs = std::filesystem;
    if (!fs::exists(root) || !fs::is_directory(root)) {
        throw RootNotFound("repository root not found: " + root.string());
    }
    std::vector<std::string> rel_paths;
    fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied);
    for (const auto& entry : it) {
        if (!entry.is_regular_file()) continue;
        std::string rel = fs::relative(entry.path(), root).generic_string();
        bool included;
        if (options.include.empty()) {
            included = rel.ends_with(".py");
        } else {
            included = false;
            for (const std::string& pat : options.include) {
                if (glob_match(pat, rel)) {
                    included = true;
                    break;
                }
            }
        }
        if (!included) continue;
        bool excluded = false;
        for (const std::string& pat : options.exclude) {
            if (glob_match(pat, rel)) {
                excluded = true;
                break;
            }
        }
        if (excluded) continue;
        rel_paths.push_back(std::move(rel));
    }
    std::sort(rel_paths.begin(), rel_paths.end());

    ScanResult result;
    for (const std::string& rel : rel_paths) {
        SourceFile file;
        file.path = rel;
        file.module_name = module_name_for_path(rel);
        if (file.module_name.empty()) file.module_name = "__init__";
        std::ifstream in(root / fs::path(rel), std::ios::binary);
        if (!in) {
            result.diagnostics.push_back(rel + ": unreadable, skipped");
            continue;
        }
        file.text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
        try {
            SyntaxTree tree = parse_file(file, python_grammar());
            if (tree.had_errors) {
                result.diagnostics.push_back(rel + ": parse errors, partial extraction");
            }
            result.transfers.push_back(extract_entities(tree, file));
        } catch (const UndecodableFile& e) {
            result.diagnostics.push_back(std::string(e.what()) + ", skipped");
        }
    }
    return result;
}

}  // namespace ranger

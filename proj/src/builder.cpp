#include "ranger/builder.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace ranger {

namespace {

std::string last_component(std::string_view dotted) {
    auto pos = dotted.rfind('.');
    return std::string(pos == std::string_view::npos ? dotted : dotted.substr(pos + 1));
}

std::string first_component(std::string_view dotted) {
    auto pos = dotted.find('.');
    return std::string(pos == std::string_view::npos ? dotted : dotted.substr(0, pos));
}

// Resolve leading-dot relative module strings against the importing module:
// in "pkg.sub.mod", ".x" -> "pkg.sub.x" and "..x" -> "pkg.x".
std::string normalize_module(std::string_view module, std::string_view importer) {
    std::size_t dots = 0;
    while (dots < module.size() && module[dots] == '.') ++dots;
    if (dots == 0) return std::string(module);
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= importer.size() && !importer.empty()) {
        std::size_t dot = importer.find('.', start);
        if (dot == std::string_view::npos) {
            parts.emplace_back(importer.substr(start));
            break;
        }
        parts.emplace_back(importer.substr(start, dot - start));
        start = dot + 1;
    }
    if (dots > parts.size()) return std::string(module);  // escapes the repository
    parts.resize(parts.size() - dots);
    std::string base;
    for (const std::string& p : parts) {
        if (!base.empty()) base += '.';
        base += p;
    }
    std::string_view rest = module.substr(dots);
    if (rest.empty()) return base;
    if (base.empty()) return std::string(rest);
    return base + "." + std::string(rest);
}

struct TransferIndex {
    // Top-level (module-scope) importable names per module.
    std::map<std::string, std::set<std::string>> public_names;
};

class Ingestor {
  public:
    Ingestor(std::span<const FileTransfer> transfers, std::string_view repo_name)
        : transfers_(transfers), repo_name_(repo_name) {}

    CodeGraph run() {
        check_duplicates();
        Node repo;
        repo.kind = NodeKind::Repo;
        repo.name = std::string(repo_name_);
        repo_id_ = graph_.add_node(std::move(repo));

        for (const FileTransfer& t : transfers_) index_public_names(t);
        for (const FileTransfer& t : transfers_) ingest_entities(t);
        for (const FileTransfer& t : transfers_) ingest_relations(t);
        for (const FileTransfer& t : transfers_) ingest_imports(t);
        return std::move(graph_);
    }

  private:
    std::span<const FileTransfer> transfers_;
    std::string_view repo_name_;
    CodeGraph graph_;
    NodeId repo_id_ = kNoNode;
    std::map<std::string, NodeId> key_to_node_;
    TransferIndex index_;

    void check_duplicates() {
        std::set<std::string> seen;
        for (const FileTransfer& t : transfers_) {
            if (!seen.insert(t.source.module_name).second) {
                throw DuplicateQualifiedName("module defined by multiple files: " +
                                             t.source.module_name);
            }
        }
    }

    void index_public_names(const FileTransfer& t) {
        auto& names = index_.public_names[t.source.module_name];
        for (const EntityRecord& e : t.entities) {
            if (e.kind != NodeKind::Class && e.kind != NodeKind::Function &&
                e.kind != NodeKind::GlobalVariable) {
                continue;
            }
            if (e.qualified == t.source.module_name + "." + e.name) names.insert(e.name);
        }
    }

    void ingest_entities(const FileTransfer& t) {
        for (const EntityRecord& e : t.entities) {
            Node n;
            n.kind = e.kind;
            n.name = e.name;
            n.signature = e.signature;
            n.code = e.code;
            if (e.kind == NodeKind::Module) {
                n.local_name = last_component(e.name);
            } else {
                n.module_name = e.module_name;
            }
            n.class_name = e.class_name;
            NodeId id = graph_.add_node(std::move(n));
            key_to_node_[e.key()] = id;
            if (e.kind == NodeKind::Module) {
                graph_.add_edge(repo_id_, id, EdgeKind::Contains);
            }
        }
    }

    void ingest_relations(const FileTransfer& t) {
        for (const Relation& r : t.relations) {
            auto src = key_to_node_.find(r.src_key);
            auto dst = key_to_node_.find(r.dst_key);
            if (src == key_to_node_.end() || dst == key_to_node_.end()) continue;
            graph_.add_edge(src->second, dst->second, r.kind);
        }
    }

    NodeId import_node(const std::string& name, const std::string& module,
                       const std::string& alias, const std::string& folder,
                       const std::string& importer) {
        std::string fp = importer + "\x1f" + module + "\x1f" + name + "\x1f" + alias;
        auto it = import_nodes_.find(fp);
        if (it != import_nodes_.end()) return it->second;
        Node n;
        n.kind = NodeKind::Import;
        n.name = name;
        n.import_module = module;
        n.import_alias = alias;
        n.dotted_folder_name = folder;
        n.importer = importer;
        NodeId id = graph_.add_node(std::move(n));
        import_nodes_[fp] = id;
        return id;
    }

    void ingest_imports(const FileTransfer& t) {
        const std::string& importer = t.source.module_name;
        // Alias bindings shadow plain-name bindings ("alias first, then name").
        std::map<std::string, const ImportRecord*> by_alias;
        std::map<std::string, const ImportRecord*> by_name;
        std::vector<const ImportRecord*> stars;
        std::map<const ImportRecord*, NodeId> record_nodes;
        for (const ImportRecord& rec : t.imports) {
            NodeId id = import_node(rec.name, rec.module, rec.alias, rec.dotted_folder_name,
                                    importer);
            record_nodes[&rec] = id;
            if (rec.is_star()) {
                stars.push_back(&rec);
            } else if (!rec.alias.empty()) {
                by_alias[rec.alias] = &rec;
            } else {
                by_name[rec.binding()] = &rec;
            }
        }

        auto lookup = [&](const std::string& name) -> const ImportRecord* {
            auto a = by_alias.find(name);
            if (a != by_alias.end()) return a->second;
            auto n = by_name.find(name);
            if (n != by_name.end()) return n->second;
            return nullptr;
        };

        auto star_match = [&](const std::string& name) -> const ImportRecord* {
            for (const ImportRecord* star : stars) {
                std::string mod = normalize_module(star->module, importer);
                auto it = index_.public_names.find(mod);
                if (it != index_.public_names.end() && it->second.contains(name)) return star;
            }
            return nullptr;
        };

        for (const UsesRef& ref : t.uses_refs) {
            auto src = key_to_node_.find(ref.src_key);
            if (src == key_to_node_.end()) continue;
            const EdgeKind edge =
                ref.kind == RefKind::Inherits ? EdgeKind::Inherits : EdgeKind::Uses;

            if (ref.name.find('.') == std::string::npos) {
                if (const ImportRecord* rec = lookup(ref.name)) {
                    graph_.add_edge(src->second, record_nodes.at(rec), edge);
                    continue;
                }
                if (const ImportRecord* star = star_match(ref.name)) {
                    // Materialize a per-name placeholder so Stage 2 can
                    // resolve it like an explicit `from m import name`.
                    std::string mod = normalize_module(star->module, importer);
                    NodeId id = import_node(ref.name, mod, "", "", importer);
                    graph_.add_edge(src->second, id, edge);
                }
                continue;
            }

            // Dotted reference (inheritance through a module attribute, e.g.
            // `class S(base.Calculator)`): derive the placeholder from the
            // import that binds the head segment.
            if (ref.kind != RefKind::Inherits) continue;
            const std::string head = first_component(ref.name);
            const std::string tail = last_component(ref.name);
            const std::string prefix = ref.name.substr(0, ref.name.size() - tail.size() - 1);
            const ImportRecord* rec = lookup(head);
            if (rec == nullptr || rec->is_star()) continue;
            std::string target_module;
            if (rec->is_plain()) {
                if (prefix == rec->alias && !rec->alias.empty()) {
                    target_module = rec->name;
                } else if (!rec->alias.empty() && prefix.starts_with(rec->alias + ".")) {
                    target_module = rec->name + prefix.substr(rec->alias.size());
                } else {
                    target_module = prefix;  // written as a real dotted path
                }
            } else {
                // `from pkg import sub` + `sub.Cls`: module is pkg.sub (+ rest).
                std::string base = rec->module.empty() ? rec->name
                                                       : rec->module + "." + rec->name;
                target_module =
                    prefix == rec->binding()
                        ? base
                        : base + prefix.substr(rec->binding().size());
            }
            NodeId id = import_node(tail, target_module, "", "", importer);
            graph_.add_edge(src->second, id, EdgeKind::Inherits);
        }
    }

    std::map<std::string, NodeId> import_nodes_;
};

}  // namespace

nlohmann::ordered_json ResolutionReport::to_json() const {
    nlohmann::ordered_json j;
    j["resolved"] = resolved;
    j["unresolved"] = nlohmann::ordered_json::array();
    for (const Unresolved& u : unresolved) {
        j["unresolved"].push_back({{"name", u.name}, {"module", u.module}, {"importer", u.importer}});
    }
    return j;
}

CodeGraph ingest(std::span<const FileTransfer> transfers, std::string_view repo_name) {
    Ingestor ingestor(transfers, repo_name);
    return ingestor.run();
}

namespace {

// Matching ladder rung 1/2: entity (or submodule) inside an exactly-known
// module path.
NodeId match_in_module(const CodeGraph& graph, const std::string& module,
                       const std::string& name) {
    for (NodeKind kind : {NodeKind::Class, NodeKind::Function, NodeKind::GlobalVariable}) {
        for (NodeId id : graph.find(kind, name)) {
            if (graph.node(id).module_name == module) return id;
        }
    }
    auto mods = graph.find(NodeKind::Module, module + "." + name);
    if (!mods.empty()) return mods.front();
    return kNoNode;
}

// Matching ladder rung 3: unique repository-wide name match.
NodeId match_unique(const CodeGraph& graph, const std::string& name) {
    std::vector<NodeId> hits;
    for (NodeKind kind : {NodeKind::Class, NodeKind::Function, NodeKind::GlobalVariable}) {
        for (NodeId id : graph.find(kind, name)) hits.push_back(id);
    }
    for (NodeId id : graph.node_ids()) {
        const Node& n = graph.node(id);
        if (n.kind == NodeKind::Module && n.local_name == name) hits.push_back(id);
    }
    return hits.size() == 1 ? hits.front() : kNoNode;
}

}  // namespace

ResolutionReport resolve_imports(CodeGraph& graph) {
    ResolutionReport report;
    std::vector<NodeId> imports;
    for (NodeId id : graph.node_ids()) {
        if (graph.node(id).kind == NodeKind::Import) imports.push_back(id);
    }

    for (NodeId id : imports) {
        const Node snapshot = graph.node(id);
        if (snapshot.name == "*") {
            graph.drop_incoming_edges(id);
            graph.remove_node(id);
            continue;  // star placeholders are expected to stay unresolved
        }
        const std::string module = normalize_module(snapshot.import_module, snapshot.importer);

        NodeId target = kNoNode;
        if (snapshot.name == snapshot.import_module) {
            // Plain `import x.y`: the entity is the module itself.
            auto mods = graph.find(NodeKind::Module, module);
            if (!mods.empty()) {
                target = mods.front();
            } else if (module.find('.') == std::string::npos) {
                target = match_unique(graph, module);
                if (target != kNoNode && graph.node(target).kind != NodeKind::Module) {
                    target = kNoNode;
                }
            }
        } else {
            target = match_in_module(graph, module, snapshot.name);
            if (target == kNoNode) target = match_unique(graph, snapshot.name);
        }

        if (target == kNoNode || target == id) {
            graph.drop_incoming_edges(id);
            graph.remove_node(id);
            report.unresolved.push_back(
                {snapshot.name, snapshot.import_module, snapshot.importer});
            continue;
        }

        // Drop edges whose kind cannot legally point at the resolved target
        // (e.g. INHERITS resolving to a global variable).
        const NodeKind target_kind = graph.node(target).kind;
        for (const auto& [src, kind] : graph.neighbors(id, Direction::In)) {
            if (src != target && !edge_is_legal(graph.node(src).kind, kind, target_kind)) {
                graph.remove_edge(src, id, kind);
            }
        }
        graph.redirect_incoming_edges(id, target);
        graph.remove_node(id);
        ++report.resolved;
    }
    return report;
}

BuildResult build(const std::filesystem::path& root, std::string_view repo_name,
                  const BuildOptions& options) {
    ScanResult scan = scan_repository(root, options.scan);
    BuildResult result;
    result.diagnostics = std::move(scan.diagnostics);
    result.graph = ingest(scan.transfers, repo_name);
    result.report = resolve_imports(result.graph);
    result.graph.freeze();
    return result;
}

}  // namespace ranger

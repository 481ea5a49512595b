#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ranger {

enum class NodeKind {
    Repo,
    Module,
    Class,
    Function,
    Method,
    Field,
    GlobalVariable,
    Import,
};

enum class EdgeKind {
    Contains,
    HasMethod,
    HasField,
    Inherits,
    Uses,
};

std::string_view to_string(NodeKind kind);
std::string_view to_string(EdgeKind kind);
std::optional<NodeKind> node_kind_from(std::string_view name);
std::optional<EdgeKind> edge_kind_from(std::string_view name);

// True when (src kind, edge kind, dst kind) is a legal triple. Import nodes
// act only as temporary edge targets for USES/INHERITS during construction.
bool edge_is_legal(NodeKind src, EdgeKind kind, NodeKind dst);

using NodeId = std::int64_t;
inline constexpr NodeId kNoNode = -1;

struct Node {
    NodeId id = kNoNode;
    NodeKind kind = NodeKind::Module;
    std::string name;                 // entity name; dotted module path for Module nodes
    std::string local_name;           // Module only: undotted module name
    std::string signature;
    std::string code;
    std::string module_name;          // owning module (Class/Function/Method/GlobalVariable)
    std::string class_name;           // owning class (Method/Field); the "class" property
    std::string import_module;        // Import only: source module string as written
    std::string import_alias;         // Import only
    std::string dotted_folder_name;   // Import only
    std::string importer;             // Import only: dotted module that declared the import
    std::string description;
    std::string member_descriptions;
    std::vector<float> embedding;     // empty = not yet embedded; unit L2 norm otherwise

    bool has_embedding() const { return !embedding.empty(); }
};

struct Edge {
    NodeId src = kNoNode;
    NodeId dst = kNoNode;
    EdgeKind kind = EdgeKind::Contains;

    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

enum class Direction { Out, In, Both };

class GraphError : public std::runtime_error {
  public:
    enum class Code {
        UnknownNode,
        MissingEndpoint,
        IllegalEndpointKind,
        SameNode,
        SelfLoop,
        Frozen,
        NonZeroInDegree,
        Inconsistent,
    };
    GraphError(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Code code() const { return code_; }

  private:
    Code code_;
};

// Typed property graph of code entities. Structure is mutable until freeze();
// descriptions and embeddings stay writable afterwards so the offline
// annotation pass can run over a structurally final graph.
class CodeGraph {
  public:
    CodeGraph() = default;

    NodeId add_node(Node node);
    void add_edge(NodeId src, NodeId dst, EdgeKind kind);
    bool has_edge(NodeId src, NodeId dst, EdgeKind kind) const;
    void remove_edge(NodeId src, NodeId dst, EdgeKind kind);
    void drop_incoming_edges(NodeId id);

    // Re-targets every incoming edge of `from` onto `to`, preserving edge
    // kind. Duplicates collapse; would-be self-loops are dropped. Returns the
    // number of edges detached from `from`.
    std::size_t redirect_incoming_edges(NodeId from, NodeId to);

    // Node must have in-degree 0; outgoing edges are removed with it.
    void remove_node(NodeId id);

    bool has_node(NodeId id) const;
    const Node& node(NodeId id) const;

    std::size_t in_degree(NodeId id) const;
    std::size_t out_degree(NodeId id) const;

    // Adjacency entries matching direction and edge-kind filter, ordered by
    // (neighbor id, edge kind). Empty filter = all kinds.
    std::vector<std::pair<NodeId, EdgeKind>> neighbors(NodeId id, Direction dir,
                                                       std::span<const EdgeKind> kinds = {}) const;

    // (kind, name) secondary index lookup; ids in ascending order.
    std::vector<NodeId> find(NodeKind kind, std::string_view name) const;
    std::vector<NodeId> find_by_name(std::string_view name) const;

    std::vector<NodeId> node_ids() const;
    std::vector<Edge> edges() const;  // sorted by (src, kind, dst)
    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edge_count_; }
    std::size_t count_kind(NodeKind kind) const;
    NodeId repo_node() const;  // kNoNode if absent

    // Property writes allowed on frozen graphs (annotation pass).
    void set_descriptions(NodeId id, std::string description, std::string member_descriptions);
    void set_embedding(NodeId id, std::vector<float> embedding);

    void freeze() { frozen_ = true; }
    bool frozen() const { return frozen_; }

    int embedding_dim() const { return embedding_dim_; }

    NodeId next_id() const { return next_id_; }
    void reserve_ids(NodeId next);        // deserialization only
    void restore_embedding_dim(int dim);  // deserialization only

    // Full consistency check: adjacency vs node set, schema legality, index
    // integrity, embedding dimension/norm. Throws GraphError on violation.
    void validate() const;

  private:
    void require_node(NodeId id) const;
    void require_mutable() const;
    void index_insert(const Node& n);
    void index_erase(const Node& n);

    std::map<NodeId, Node> nodes_;
    std::map<NodeId, std::set<std::pair<NodeId, EdgeKind>>> out_;
    std::map<NodeId, std::set<std::pair<NodeId, EdgeKind>>> in_;
    std::map<std::pair<NodeKind, std::string>, std::set<NodeId>, std::less<>> index_;
    std::size_t edge_count_ = 0;
    NodeId next_id_ = 0;
    int embedding_dim_ = 0;
    bool frozen_ = false;
};

}  // namespace ranger

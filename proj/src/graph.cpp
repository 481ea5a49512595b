#include "ranger/graph.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <tuple>

namespace ranger {

namespace {

constexpr std::array<std::string_view, 8> kNodeKindNames = {
    "Repo", "Module", "Class", "Function", "Method", "Field", "GlobalVariable", "Import",
};

constexpr std::array<std::string_view, 5> kEdgeKindNames = {
    "CONTAINS", "HAS_METHOD", "HAS_FIELD", "INHERITS", "USES",
};

}  // namespace

std::string_view to_string(NodeKind kind) { return kNodeKindNames[static_cast<std::size_t>(kind)]; }

std::string_view to_string(EdgeKind kind) { return kEdgeKindNames[static_cast<std::size_t>(kind)]; }

std::optional<NodeKind> node_kind_from(std::string_view name) {
    for (std::size_t i = 0; i < kNodeKindNames.size(); ++i) {
        if (kNodeKindNames[i] == name) return static_cast<NodeKind>(i);
    }
    return std::nullopt;
}

std::optional<EdgeKind> edge_kind_from(std::string_view name) {
    for (std::size_t i = 0; i < kEdgeKindNames.size(); ++i) {
        if (kEdgeKindNames[i] == name) return static_cast<EdgeKind>(i);
    }
    return std::nullopt;
}

bool edge_is_legal(NodeKind src, EdgeKind kind, NodeKind dst) {
    using K = NodeKind;
    auto entity_like = [](NodeKind k) {
        return k == K::Class || k == K::Function || k == K::Method || k == K::GlobalVariable;
    };
    switch (kind) {
        case EdgeKind::Contains:
            // Lexical nesting: Repo->Module, Module->top-level entities, and
            // Class/Function/Method->nested Class/Function definitions.
            if (src == K::Repo) return dst == K::Module;
            if (src == K::Module)
                return dst == K::Module || dst == K::Class || dst == K::Function ||
                       dst == K::GlobalVariable;
            if (src == K::Class || src == K::Function || src == K::Method)
                return dst == K::Class || dst == K::Function;
            return false;
        case EdgeKind::HasMethod:
            return src == K::Class && dst == K::Method;
        case EdgeKind::HasField:
            return src == K::Class && dst == K::Field;
        case EdgeKind::Inherits:
            return src == K::Class && (dst == K::Class || dst == K::Import);
        case EdgeKind::Uses:
            // Module targets arise when a plain `import pkg` resolves to the
            // module node itself.
            return entity_like(src) && (entity_like(dst) || dst == K::Module || dst == K::Import);
    }
    return false;
}

void CodeGraph::require_node(NodeId id) const {
    if (!nodes_.contains(id)) {
        throw GraphError(GraphError::Code::UnknownNode,
                         "unknown node id " + std::to_string(id));
    }
}

void CodeGraph::require_mutable() const {
    if (frozen_) {
        throw GraphError(GraphError::Code::Frozen, "graph is frozen");
    }
}

void CodeGraph::index_insert(const Node& n) { index_[{n.kind, n.name}].insert(n.id); }

void CodeGraph::index_erase(const Node& n) {
    auto it = index_.find(std::pair<NodeKind, std::string>{n.kind, n.name});
    if (it != index_.end()) {
        it->second.erase(n.id);
        if (it->second.empty()) index_.erase(it);
    }
}

NodeId CodeGraph::add_node(Node node) {
    require_mutable();
    node.id = next_id_++;
    if (node.has_embedding()) {
        if (embedding_dim_ == 0) embedding_dim_ = static_cast<int>(node.embedding.size());
    }
    index_insert(node);
    NodeId id = node.id;
    out_[id];
    in_[id];
    nodes_.emplace(id, std::move(node));
    return id;
}

void CodeGraph::add_edge(NodeId src, NodeId dst, EdgeKind kind) {
    require_mutable();
    if (!nodes_.contains(src) || !nodes_.contains(dst)) {
        throw GraphError(GraphError::Code::MissingEndpoint,
                         "edge endpoint missing: " + std::to_string(src) + " -> " +
                             std::to_string(dst));
    }
    if (src == dst) {
        throw GraphError(GraphError::Code::SelfLoop, "self-loop on node " + std::to_string(src));
    }
    const NodeKind sk = nodes_.at(src).kind;
    const NodeKind dk = nodes_.at(dst).kind;
    if (!edge_is_legal(sk, kind, dk)) {
        throw GraphError(GraphError::Code::IllegalEndpointKind,
                         std::string("illegal edge ") + std::string(to_string(sk)) + " -" +
                             std::string(to_string(kind)) + "-> " + std::string(to_string(dk)));
    }
    if (out_[src].insert({dst, kind}).second) {
        in_[dst].insert({src, kind});
        ++edge_count_;
    }
}

bool CodeGraph::has_edge(NodeId src, NodeId dst, EdgeKind kind) const {
    auto it = out_.find(src);
    return it != out_.end() && it->second.contains({dst, kind});
}

void CodeGraph::remove_edge(NodeId src, NodeId dst, EdgeKind kind) {
    require_mutable();
    require_node(src);
    require_node(dst);
    if (out_[src].erase({dst, kind}) > 0) {
        in_[dst].erase({src, kind});
        --edge_count_;
    }
}

void CodeGraph::drop_incoming_edges(NodeId id) {
    require_mutable();
    require_node(id);
    auto incoming = in_[id];  // copy: we mutate while iterating
    for (const auto& [src, kind] : incoming) {
        out_[src].erase({id, kind});
        --edge_count_;
    }
    in_[id].clear();
}

std::size_t CodeGraph::redirect_incoming_edges(NodeId from, NodeId to) {
    require_mutable();
    require_node(from);
    require_node(to);
    if (from == to) {
        throw GraphError(GraphError::Code::SameNode, "redirect onto the same node");
    }
    auto incoming = in_[from];
    // Pre-check legality so the redirect is all-or-nothing.
    for (const auto& [src, kind] : incoming) {
        if (src == to) continue;
        if (!edge_is_legal(nodes_.at(src).kind, kind, nodes_.at(to).kind)) {
            throw GraphError(GraphError::Code::IllegalEndpointKind,
                             "redirect would create an illegal edge");
        }
    }
    std::size_t moved = incoming.size();
    for (const auto& [src, kind] : incoming) {
        out_[src].erase({from, kind});
        --edge_count_;
        if (src == to) continue;  // would be a self-loop; drop
        add_edge(src, to, kind);  // idempotent on duplicates
    }
    in_[from].clear();
    return moved;
}

void CodeGraph::remove_node(NodeId id) {
    require_mutable();
    require_node(id);
    if (!in_[id].empty()) {
        throw GraphError(GraphError::Code::NonZeroInDegree,
                         "node " + std::to_string(id) + " still has incoming edges");
    }
    for (const auto& [dst, kind] : out_[id]) {
        in_[dst].erase({id, kind});
        --edge_count_;
    }
    out_.erase(id);
    in_.erase(id);
    index_erase(nodes_.at(id));
    nodes_.erase(id);
}

bool CodeGraph::has_node(NodeId id) const { return nodes_.contains(id); }

const Node& CodeGraph::node(NodeId id) const {
    require_node(id);
    return nodes_.at(id);
}

std::size_t CodeGraph::in_degree(NodeId id) const {
    require_node(id);
    return in_.at(id).size();
}

std::size_t CodeGraph::out_degree(NodeId id) const {
    require_node(id);
    return out_.at(id).size();
}

std::vector<std::pair<NodeId, EdgeKind>> CodeGraph::neighbors(
    NodeId id, Direction dir, std::span<const EdgeKind> kinds) const {
    require_node(id);
    auto want = [&](EdgeKind k) {
        if (kinds.empty()) return true;
        return std::find(kinds.begin(), kinds.end(), k) != kinds.end();
    };
    std::vector<std::pair<NodeId, EdgeKind>> result;
    if (dir == Direction::Out || dir == Direction::Both) {
        for (const auto& [dst, kind] : out_.at(id)) {
            if (want(kind)) result.emplace_back(dst, kind);
        }
    }
    if (dir == Direction::In || dir == Direction::Both) {
        for (const auto& [src, kind] : in_.at(id)) {
            if (want(kind)) result.emplace_back(src, kind);
        }
    }
    std::sort(result.begin(), result.end());
    result.erase(std::unique(result.begin(), result.end()), result.end());
    return result;
}

std::vector<NodeId> CodeGraph::find(NodeKind kind, std::string_view name) const {
    auto it = index_.find(std::pair<NodeKind, std::string>{kind, std::string(name)});
    if (it == index_.end()) return {};
    return {it->second.begin(), it->second.end()};
}

std::vector<NodeId> CodeGraph::find_by_name(std::string_view name) const {
    std::vector<NodeId> out;
    for (std::size_t i = 0; i < kNodeKindNames.size(); ++i) {
        auto ids = find(static_cast<NodeKind>(i), name);
        out.insert(out.end(), ids.begin(), ids.end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<NodeId> CodeGraph::node_ids() const {
    std::vector<NodeId> ids;
    ids.reserve(nodes_.size());
    for (const auto& [id, _] : nodes_) ids.push_back(id);
    return ids;
}

std::vector<Edge> CodeGraph::edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count_);
    for (const auto& [src, adj] : out_) {
        for (const auto& [dst, kind] : adj) out.push_back({src, dst, kind});
    }
    std::sort(out.begin(), out.end(), [](const Edge& a, const Edge& b) {
        return std::tie(a.src, a.kind, a.dst) < std::tie(b.src, b.kind, b.dst);
    });
    return out;
}

std::size_t CodeGraph::count_kind(NodeKind kind) const {
    std::size_t n = 0;
    for (const auto& [_, node] : nodes_) {
        if (node.kind == kind) ++n;
    }
    return n;
}

NodeId CodeGraph::repo_node() const {
    for (const auto& [id, node] : nodes_) {
        if (node.kind == NodeKind::Repo) return id;
    }
    return kNoNode;
}

void CodeGraph::set_descriptions(NodeId id, std::string description,
                                 std::string member_descriptions) {
    require_node(id);
    Node& n = nodes_.at(id);
    n.description = std::move(description);
    n.member_descriptions = std::move(member_descriptions);
}

void CodeGraph::set_embedding(NodeId id, std::vector<float> embedding) {
    require_node(id);
    if (embedding_dim_ == 0) {
        embedding_dim_ = static_cast<int>(embedding.size());
    } else if (static_cast<int>(embedding.size()) != embedding_dim_) {
        throw GraphError(GraphError::Code::Inconsistent,
                         "embedding dimension mismatch on node " + std::to_string(id));
    }
    nodes_.at(id).embedding = std::move(embedding);
}

void CodeGraph::reserve_ids(NodeId next) {
    if (next > next_id_) next_id_ = next;
}

void CodeGraph::restore_embedding_dim(int dim) {
    if (embedding_dim_ == 0) embedding_dim_ = dim;
}

void CodeGraph::validate() const {
    auto fail = [](const std::string& msg) {
        throw GraphError(GraphError::Code::Inconsistent, msg);
    };
    std::size_t out_total = 0, in_total = 0;
    for (const auto& [id, adj] : out_) {
        if (!nodes_.contains(id)) fail("out-adjacency for missing node");
        for (const auto& [dst, kind] : adj) {
            if (!nodes_.contains(dst)) fail("dangling edge target");
            if (dst == id) fail("self-loop");
            if (!edge_is_legal(nodes_.at(id).kind, kind, nodes_.at(dst).kind)) {
                fail("illegal edge kind triple");
            }
            if (!in_.at(dst).contains({id, kind})) fail("missing reverse adjacency");
            ++out_total;
        }
    }
    for (const auto& [id, adj] : in_) {
        if (!nodes_.contains(id)) fail("in-adjacency for missing node");
        for (const auto& [src, kind] : adj) {
            if (!out_.at(src).contains({id, kind})) fail("missing forward adjacency");
            ++in_total;
        }
    }
    if (out_total != edge_count_ || in_total != edge_count_) fail("edge count drift");
    for (const auto& [id, node] : nodes_) {
        if (node.id != id) fail("node id mismatch");
        if (id >= next_id_) fail("node id beyond allocation counter");
        auto found = find(node.kind, node.name);
        if (std::find(found.begin(), found.end(), id) == found.end()) fail("index missing node");
        if (node.kind == NodeKind::Method || node.kind == NodeKind::Field) {
            if (node.class_name.empty()) fail("Method/Field without owning class");
        } else if (!node.class_name.empty()) {
            fail("class property on non-member node");
        }
        if (node.has_embedding()) {
            if (embedding_dim_ != 0 &&
                static_cast<int>(node.embedding.size()) != embedding_dim_) {
                fail("embedding dimension mismatch");
            }
            double norm = 0.0;
            for (float v : node.embedding) norm += static_cast<double>(v) * v;
            norm = std::sqrt(norm);
            if (std::abs(norm - 1.0) > 1e-6) fail("embedding not unit-normalized");
        }
    }
    for (const auto& [key, ids] : index_) {
        for (NodeId id : ids) {
            if (!nodes_.contains(id)) fail("index references missing node");
            const Node& n = nodes_.at(id);
            if (n.kind != key.first || n.name != key.second) fail("index key mismatch");
        }
    }
}

}  // namespace ranger

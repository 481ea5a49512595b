#include "ranger/annotate.hpp"

#include <algorithm>
#include <map>

namespace ranger {

namespace {

constexpr EdgeKind kHierarchy[] = {EdgeKind::Contains, EdgeKind::HasMethod, EdgeKind::HasField};

std::vector<NodeId> hierarchy_children(const CodeGraph& graph, NodeId id) {
    std::vector<NodeId> out;
    for (const auto& [child, kind] : graph.neighbors(id, Direction::Out, kHierarchy)) {
        (void)kind;
        out.push_back(child);
    }
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace

std::vector<NodeId> annotation_order(const CodeGraph& graph) {
    std::vector<NodeId> order;
    enum class Mark : unsigned char { None, Active, Done };
    std::map<NodeId, Mark> marks;

    // Iterative post-order DFS; the Active mark guards against hierarchy
    // cycles, which the edge schema should already rule out.
    auto visit_root = [&](NodeId root) {
        std::vector<std::pair<NodeId, std::size_t>> stack{{root, 0}};
        marks[root] = Mark::Active;
        while (!stack.empty()) {
            auto& [id, next_child] = stack.back();
            auto children = hierarchy_children(graph, id);
            if (next_child < children.size()) {
                NodeId child = children[next_child++];
                Mark m = marks.count(child) ? marks[child] : Mark::None;
                if (m == Mark::Active) {
                    throw HierarchyCycle("containment cycle at node " + std::to_string(child));
                }
                if (m == Mark::Done) continue;
                marks[child] = Mark::Active;
                stack.emplace_back(child, 0);
                continue;
            }
            marks[id] = Mark::Done;
            if (graph.node(id).kind != NodeKind::Repo) order.push_back(id);
            stack.pop_back();
        }
    };

    NodeId repo = graph.repo_node();
    if (repo != kNoNode) visit_root(repo);
    // Nodes not reachable from the Repo root (detached subgraphs) still get
    // annotated, children-first.
    for (NodeId id : graph.node_ids()) {
        if (!marks.count(id) && graph.node(id).kind != NodeKind::Repo) visit_root(id);
    }
    return order;
}

std::string node_semantic_text(const Node& node) {
    return node.description + "\n" + node.member_descriptions;
}

void annotate_node(CodeGraph& graph, NodeId id, DescriberClient& describer,
                   std::size_t size_limit) {
    const Node& node = graph.node(id);
    const bool always_small =
        node.kind == NodeKind::Field || node.kind == NodeKind::GlobalVariable;
    const bool small = always_small || node.code.size() <= size_limit;

    auto compose = [&] {
        std::string members;
        for (NodeId child : hierarchy_children(graph, id)) {
            const Node& c = graph.node(child);
            if (c.description.empty()) continue;
            std::string first_line = c.description.substr(0, c.description.find('\n'));
            if (!members.empty()) members += '\n';
            members += c.name + " - " + first_line;
        }
        std::string description = describer.describe(members, DescribeMode::SummarizeFromMembers);
        graph.set_descriptions(id, std::move(description), std::move(members));
    };

    if (small) {
        try {
            std::string description = describer.describe(node.code, DescribeMode::SummarizeCode);
            std::string members = describer.describe(node.code, DescribeMode::ListMembers);
            graph.set_descriptions(id, std::move(description), std::move(members));
            return;
        } catch (const ContextOverflow&) {
            // fall through to the composed path
        }
    }
    compose();
}

AnnotationReport annotate_graph(CodeGraph& graph, DescriberClient& describer,
                                const AnnotateOptions& options) {
    AnnotationReport report;
    for (NodeId id : annotation_order(graph)) {
        try {
            annotate_node(graph, id, describer, options.size_limit);
            ++report.annotated;
        } catch (const BackendUnavailable& e) {
            report.skipped.emplace_back(id, e.what());
        }
    }
    return report;
}

std::size_t embed_graph(CodeGraph& graph, EmbedderClient& embedder) {
    std::vector<NodeId> ids;
    std::vector<std::string> texts;
    for (NodeId id : graph.node_ids()) {
        const Node& n = graph.node(id);
        if (n.kind == NodeKind::Repo) continue;
        if (n.description.empty() && n.member_descriptions.empty()) continue;
        ids.push_back(id);
        texts.push_back(node_semantic_text(n));
    }
    constexpr std::size_t kBatch = 64;
    for (std::size_t start = 0; start < ids.size(); start += kBatch) {
        const std::size_t count = std::min(kBatch, ids.size() - start);
        auto vectors = embedder.embed(std::span<const std::string>(texts).subspan(start, count));
        if (vectors.size() != count) {
            throw DimensionMismatch("embedder returned wrong batch size");
        }
        for (std::size_t i = 0; i < count; ++i) {
            graph.set_embedding(ids[start + i], std::move(vectors[i]));
        }
    }
    return ids.size();
}

}  // namespace ranger

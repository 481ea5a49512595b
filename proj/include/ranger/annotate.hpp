#pragma once

#include <string>
#include <vector>

#include "ranger/encoders.hpp"
#include "ranger/graph.hpp"

namespace ranger {

class HierarchyCycle : public std::runtime_error {
  public:
    explicit HierarchyCycle(const std::string& what) : std::runtime_error(what) {}
};

// Bottom-up order over the CONTAINS/HAS_METHOD/HAS_FIELD hierarchy: every
// node appears after all of its hierarchical children; the Repo node is
// excluded. Deterministic (children visited in id order).
std::vector<NodeId> annotation_order(const CodeGraph& graph);

// Text the node contributes to embeddings and reranking.
std::string node_semantic_text(const Node& node);

struct AnnotateOptions {
    // Entities whose code is at most this long are described directly from
    // code; larger ones are composed from member summaries.
    std::size_t size_limit = 6000;
};

// Fills description + member_descriptions for one node. Children must
// already be annotated.
void annotate_node(CodeGraph& graph, NodeId id, DescriberClient& describer,
                   std::size_t size_limit);

struct AnnotationReport {
    std::size_t annotated = 0;
    std::vector<std::pair<NodeId, std::string>> skipped;  // node, reason
};

AnnotationReport annotate_graph(CodeGraph& graph, DescriberClient& describer,
                                const AnnotateOptions& options = {});

// Embeds every node that has at least one description; returns the count.
std::size_t embed_graph(CodeGraph& graph, EmbedderClient& embedder);

}  // namespace ranger

#pragma once

#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ranger/encoders.hpp"
#include "ranger/graph.hpp"

namespace ranger {

// Final-score formula variant: the pseudocode form uses the simulation-only
// counters and scales similarity by 10; the prose form uses the plain visit
// averages and raw similarity.
enum class ExtractionVariant { Simulation, Prose };

struct SearchConfig {
    double exploration_c = 0.25;   // UCT exploration constant
    double alpha = 0.5;            // weight between reward and similarity
    int k_init = 20;               // initial expansion width
    int k_min = 20;                // width floor
    int budget = 10;               // ranked-result size B
    int iterations = 200;          // rollouts T
    NodeId root = kNoNode;         // kNoNode: use the Repo node
    ExtractionVariant extraction = ExtractionVariant::Simulation;

    void validate() const;  // throws std::invalid_argument on bad values
};

// Defaults derived from the loaded graph: k_init = module_count // 2,
// k_min = 20, alpha = 0.5, c = 1 / (8 * sqrt(ln(2 * module_count))).
SearchConfig default_search_config(const CodeGraph& graph);

struct TreeNode {
    NodeId graph_node = kNoNode;
    int parent = -1;  // arena index
    std::vector<int> children;
    int visits = 0;            // N_v
    double total_reward = 0;   // R_v
    int sim_visits = 0;        // N_v^(s)
    double sim_reward = 0;     // R_v^(s)
    bool fully_expanded = false;
    bool has_embedding = false;
    double sim_to_query = 0;   // cached cosine(E_q, E_v)
};

// Arena-backed search tree with the no-duplicate-graph-node discipline.
class SearchTree {
  public:
    explicit SearchTree(NodeId root_graph_node, bool root_has_embedding = false,
                        double root_sim = 0.0);

    int root() const { return 0; }
    const TreeNode& at(int index) const { return nodes_[static_cast<std::size_t>(index)]; }
    TreeNode& at(int index) { return nodes_[static_cast<std::size_t>(index)]; }
    std::size_t size() const { return nodes_.size(); }
    bool contains_graph_node(NodeId id) const { return in_tree_.contains(id); }

    int add_child(int parent, NodeId graph_node, double sim_to_query, bool has_embedding);

    int depth(int index) const;

  private:
    std::vector<TreeNode> nodes_;
    std::set<NodeId> in_tree_;
};

// UCT(v) = R_v / max(1, N_v) + c * sqrt(2 * ln(max(1, N_parent)) / max(1, N_v))
double uct_score(const SearchTree& tree, int index, double exploration_c);

// s(v) = alpha * R_s / max(1, N_s) + (1 - alpha) * sim * 10   (Simulation)
//      = alpha * R   / max(1, N)   + (1 - alpha) * sim        (Prose)
double retrieval_score(const TreeNode& node, double alpha,
                       ExtractionVariant variant = ExtractionVariant::Simulation);

// Selection: descend through fully-expanded nodes by argmax UCT; land on a
// leaf or an expandable node. Exhausted landings walk up to the nearest
// expandable ancestor, then anywhere in the tree; -1 means the whole tree is
// exhausted and the search should stop.
int select_node(SearchTree& tree, const CodeGraph& graph, double exploration_c);

// Expansion: attach the top-k most query-similar unvisited neighbors (both
// directions, any edge kind; embedded nodes only) as children. Empty
// candidate set marks the node fully expanded.
std::vector<int> expand(SearchTree& tree, int index, const CodeGraph& graph,
                        std::span<const float> query_embedding, int k);

// Simulation: one batched cross-encoder call; rewards are clamp(score*10, 0, 10).
std::vector<double> simulate_batch(RerankerClient& reranker, const std::string& query_text,
                                   const CodeGraph& graph, const SearchTree& tree,
                                   std::span<const int> node_indices);

// Backpropagation: +1 visit and +reward on the path to the root; the
// evaluated node additionally accumulates the simulation counters.
void backpropagate(SearchTree& tree, int index, double reward);

struct RankedNode {
    NodeId node = kNoNode;
    double score = 0;
    int visits = 0;
    double mean_sim_reward = 0;
    double bi_encoder_sim = 0;
};

struct SearchResult {
    std::vector<RankedNode> ranked;
    bool partial = false;          // a backend failed mid-search
    std::size_t tree_size = 0;     // graph nodes that entered the tree
    std::size_t iterations_run = 0;

    nlohmann::ordered_json to_json(const CodeGraph& graph) const;
};

SearchResult search(const CodeGraph& graph, const std::string& query_text,
                    EmbedderClient& embedder, RerankerClient& reranker,
                    const SearchConfig& config);

}  // namespace ranger

#include "ranger/mcts.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ranger/annotate.hpp"
#include "ranger/text.hpp"

namespace ranger {

void SearchConfig::validate() const {
    if (k_min < 1) throw std::invalid_argument("k_min must be >= 1");
    if (k_init < k_min) throw std::invalid_argument("k_init must be >= k_min");
    if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("alpha must be in [0, 1]");
    if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
    if (budget < 1) throw std::invalid_argument("budget must be >= 1");
    if (exploration_c <= 0.0) throw std::invalid_argument("exploration c must be > 0");
}

SearchConfig default_search_config(const CodeGraph& graph) {
    SearchConfig config;
    const auto modules = static_cast<double>(std::max<std::size_t>(1, graph.count_kind(NodeKind::Module)));
    config.k_min = 20;
    config.k_init = std::max(config.k_min, static_cast<int>(modules) / 2);
    config.alpha = 0.5;
    config.exploration_c = 1.0 / (8.0 * std::sqrt(std::log(2.0 * modules)));
    config.iterations = 200;
    config.budget = 10;
    return config;
}

SearchTree::SearchTree(NodeId root_graph_node, bool root_has_embedding, double root_sim) {
    TreeNode root;
    root.graph_node = root_graph_node;
    root.has_embedding = root_has_embedding;
    root.sim_to_query = root_sim;
    nodes_.push_back(std::move(root));
    in_tree_.insert(root_graph_node);
}

int SearchTree::add_child(int parent, NodeId graph_node, double sim_to_query,
                          bool has_embedding) {
    if (in_tree_.contains(graph_node)) {
        throw std::invalid_argument("graph node already present in the search tree");
    }
    TreeNode node;
    node.graph_node = graph_node;
    node.parent = parent;
    node.sim_to_query = sim_to_query;
    node.has_embedding = has_embedding;
    nodes_.push_back(std::move(node));
    const int index = static_cast<int>(nodes_.size()) - 1;
    nodes_[static_cast<std::size_t>(parent)].children.push_back(index);
    in_tree_.insert(graph_node);
    return index;
}

int SearchTree::depth(int index) const {
    int d = 0;
    while (nodes_[static_cast<std::size_t>(index)].parent >= 0) {
        index = nodes_[static_cast<std::size_t>(index)].parent;
        ++d;
    }
    return d;
}

double uct_score(const SearchTree& tree, int index, double exploration_c) {
    const TreeNode& node = tree.at(index);
    if (node.parent < 0) throw std::invalid_argument("the root has no UCT score");
    const TreeNode& parent = tree.at(node.parent);
    const double n = std::max(1, node.visits);
    const double np = std::max(1, parent.visits);
    return node.total_reward / n + exploration_c * std::sqrt(2.0 * std::log(np) / n);
}

double retrieval_score(const TreeNode& node, double alpha, ExtractionVariant variant) {
    if (variant == ExtractionVariant::Simulation) {
        const double mean = node.sim_reward / std::max(1, node.sim_visits);
        return alpha * mean + (1.0 - alpha) * node.sim_to_query * 10.0;
    }
    const double mean = node.total_reward / std::max(1, node.visits);
    return alpha * mean + (1.0 - alpha) * node.sim_to_query;
}

namespace {

bool has_expandable_neighbor(const SearchTree& tree, const CodeGraph& graph, NodeId id) {
    for (const auto& [nbr, kind] : graph.neighbors(id, Direction::Both)) {
        (void)kind;
        if (!tree.contains_graph_node(nbr) && graph.node(nbr).has_embedding()) return true;
    }
    return false;
}

}  // namespace

int select_node(SearchTree& tree, const CodeGraph& graph, double exploration_c) {
    int curr = tree.root();
    while (!tree.at(curr).children.empty() && tree.at(curr).fully_expanded) {
        int best = -1;
        double top = 0.0;
        for (int child : tree.at(curr).children) {
            // Ties keep the earliest child, i.e. the highest bi-encoder rank.
            double s = uct_score(tree, child, exploration_c);
            if (best < 0 || s > top) {
                best = child;
                top = s;
            }
        }
        curr = best;
    }

    const TreeNode& landed = tree.at(curr);
    const bool exhausted_leaf =
        landed.children.empty() && !has_expandable_neighbor(tree, graph, landed.graph_node) &&
        (landed.visits >= 2 || landed.fully_expanded);
    if (!exhausted_leaf) return curr;

    // Walk up to the nearest expandable ancestor.
    for (int up = landed.parent; up >= 0; up = tree.at(up).parent) {
        if (has_expandable_neighbor(tree, graph, tree.at(up).graph_node)) return up;
    }
    // Fall back to any expandable node in the tree (shallowest, then oldest)
    // so rollouts cannot spin on a dead branch while work remains elsewhere.
    int best = -1, best_depth = 0;
    for (int i = 0; i < static_cast<int>(tree.size()); ++i) {
        if (!has_expandable_neighbor(tree, graph, tree.at(i).graph_node)) continue;
        const int d = tree.depth(i);
        if (best < 0 || d < best_depth) {
            best = i;
            best_depth = d;
        }
    }
    return best;
}

namespace {

double cosine_to_query(std::span<const float> query, const std::vector<float>& v) {
    double num = 0.0, nq = 0.0, nv = 0.0;
    const std::size_t n = std::min(query.size(), v.size());
    for (std::size_t i = 0; i < n; ++i) {
        num += static_cast<double>(query[i]) * v[i];
        nq += static_cast<double>(query[i]) * query[i];
        nv += static_cast<double>(v[i]) * v[i];
    }
    if (nq == 0.0 || nv == 0.0) return 0.0;
    return num / (std::sqrt(nq) * std::sqrt(nv));
}

}  // namespace

std::vector<int> expand(SearchTree& tree, int index, const CodeGraph& graph,
                        std::span<const float> query_embedding, int k) {
    const NodeId from = tree.at(index).graph_node;
    struct Candidate {
        double sim;
        NodeId id;
    };
    std::vector<Candidate> candidates;
    for (const auto& [nbr, kind] : graph.neighbors(from, Direction::Both)) {
        (void)kind;
        if (tree.contains_graph_node(nbr)) continue;
        const Node& n = graph.node(nbr);
        if (!n.has_embedding()) continue;
        candidates.push_back({cosine_to_query(query_embedding, n.embedding), nbr});
    }
    if (candidates.empty()) {
        tree.at(index).fully_expanded = true;
        return {};
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.sim != b.sim) return a.sim > b.sim;
        return a.id < b.id;
    });
    if (static_cast<int>(candidates.size()) > k) candidates.resize(static_cast<std::size_t>(k));

    std::vector<int> added;
    for (const Candidate& c : candidates) {
        added.push_back(tree.add_child(index, c.id, c.sim, true));
    }
    return added;
}

std::vector<double> simulate_batch(RerankerClient& reranker, const std::string& query_text,
                                   const CodeGraph& graph, const SearchTree& tree,
                                   std::span<const int> node_indices) {
    std::vector<std::string> documents;
    documents.reserve(node_indices.size());
    for (int idx : node_indices) {
        documents.push_back(node_semantic_text(graph.node(tree.at(idx).graph_node)));
    }
    std::vector<double> raw = reranker.rerank(query_text, documents);
    std::vector<double> rewards;
    rewards.reserve(raw.size());
    for (double s : raw) {
        rewards.push_back(std::clamp(s * 10.0, 0.0, 10.0));
    }
    return rewards;
}

void backpropagate(SearchTree& tree, int index, double reward) {
    const int evaluated = index;
    for (int v = index; v >= 0; v = tree.at(v).parent) {
        TreeNode& node = tree.at(v);
        node.visits += 1;
        node.total_reward += reward;
        if (v == evaluated) {
            node.sim_visits += 1;
            node.sim_reward += reward;
        }
    }
}

nlohmann::ordered_json SearchResult::to_json(const CodeGraph& graph) const {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const RankedNode& r : ranked) {
        const Node& n = graph.node(r.node);
        nlohmann::ordered_json item;
        item["node"] = {{"kind", to_string(n.kind)}, {"name", n.name}};
        if (!n.module_name.empty()) item["node"]["module_name"] = n.module_name;
        item["score"] = r.score;
        item["visits"] = r.visits;
        item["mean_sim_reward"] = r.mean_sim_reward;
        item["bi_encoder_sim"] = r.bi_encoder_sim;
        j.push_back(std::move(item));
    }
    return j;
}

SearchResult search(const CodeGraph& graph, const std::string& query_text,
                    EmbedderClient& embedder, RerankerClient& reranker,
                    const SearchConfig& config) {
    config.validate();
    SearchResult result;

    NodeId root = config.root == kNoNode ? graph.repo_node() : config.root;
    if (root == kNoNode || !graph.has_node(root)) return result;

    const std::vector<float> query_embedding = embedder.embed_one(query_text);
    const Node& root_node = graph.node(root);
    SearchTree tree(root, root_node.has_embedding(),
                    root_node.has_embedding()
                        ? cosine_to_query(query_embedding, root_node.embedding)
                        : 0.0);

    int k = config.k_init;
    for (int t = 1; t <= config.iterations; ++t) {
        result.iterations_run = static_cast<std::size_t>(t);
        const int curr = select_node(tree, graph, config.exploration_c);
        if (curr < 0) break;  // whole tree exhausted

        std::vector<int> added = expand(tree, curr, graph, query_embedding, k);
        if (added.empty()) continue;  // marked fully expanded; costs this rollout
        k = std::max(config.k_min, k / 2);

        std::vector<double> rewards;
        try {
            rewards = simulate_batch(reranker, query_text, graph, tree, added);
        } catch (const BackendUnavailable&) {
            result.partial = true;
            break;
        }
        for (std::size_t i = 0; i < added.size(); ++i) {
            backpropagate(tree, added[i], rewards[i]);
        }
    }

    result.tree_size = tree.size();
    std::vector<RankedNode> ranked;
    for (int i = 0; i < static_cast<int>(tree.size()); ++i) {
        const TreeNode& node = tree.at(i);
        if (node.visits <= 0 || !node.has_embedding) continue;
        RankedNode r;
        r.node = node.graph_node;
        r.score = retrieval_score(node, config.alpha, config.extraction);
        r.visits = node.visits;
        r.mean_sim_reward = node.sim_reward / std::max(1, node.sim_visits);
        r.bi_encoder_sim = node.sim_to_query;
        ranked.push_back(r);
    }
    std::sort(ranked.begin(), ranked.end(), [](const RankedNode& a, const RankedNode& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.node < b.node;
    });
    if (static_cast<int>(ranked.size()) > config.budget) {
        ranked.resize(static_cast<std::size_t>(config.budget));
    }
    result.ranked = std::move(ranked);
    return result;
}

}  // namespace ranger

#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ranger/graph.hpp"

namespace ranger {

class NoRelevantItems : public std::runtime_error {
  public:
    explicit NoRelevantItems(const std::string& what) : std::runtime_error(what) {}
};

namespace metrics {

// relevances: item id -> graded relevance (>= 0); relevant means > 0.
// All four throw NoRelevantItems when nothing is relevant; callers exclude
// such queries from averages.

// DCG with gain = rel and discount 1/log2(rank + 1), normalized by the ideal
// DCG truncated at k.
double ndcg_at_k(std::span<const std::string> ranking,
                 const std::map<std::string, int>& relevances, int k);

double recall_at_k(std::span<const std::string> ranking,
                   const std::map<std::string, int>& relevances, int k);

double mrr_at_k(std::span<const std::string> ranking,
                const std::map<std::string, int>& relevances, int k);

double accuracy_at_k(std::span<const std::string> ranking,
                     const std::map<std::string, int>& relevances, int k);

}  // namespace metrics

struct QrelsEntry {
    std::string qid;
    std::string query;
    std::vector<std::pair<std::string, int>> relevant;  // item id, graded relevance

    std::map<std::string, int> relevance_map() const;
    bool has_positive() const;
};

// Ground-truth file: JSONL, one
//   {"qid":...,"query":...,"relevant":[{"id":...,"rel":...}]}
// per line. Item ids are "module::kind::name" strings (see node_item_id).
struct Qrels {
    std::vector<QrelsEntry> queries;

    static Qrels load_jsonl(const std::filesystem::path& path);
    void save_jsonl(const std::filesystem::path& path) const;
};

// Stable item id for a graph node: module::kind::qualified-name, where the
// last segment includes the owning class for methods and fields.
std::string node_item_id(const Node& node);

}  // namespace ranger

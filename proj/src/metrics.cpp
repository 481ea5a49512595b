#include "ranger/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

namespace ranger {

namespace metrics {

namespace {

void require_positive(const std::map<std::string, int>& relevances, int k) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    for (const auto& [id, rel] : relevances) {
        if (rel > 0) return;
    }
    throw NoRelevantItems("no relevant items for this query");
}

}  // namespace

double ndcg_at_k(std::span<const std::string> ranking,
                 const std::map<std::string, int>& relevances, int k) {
    require_positive(relevances, k);
    const std::size_t cutoff = std::min<std::size_t>(ranking.size(), static_cast<std::size_t>(k));
    double dcg = 0.0;
    for (std::size_t i = 0; i < cutoff; ++i) {
        auto it = relevances.find(ranking[i]);
        if (it == relevances.end() || it->second <= 0) continue;
        dcg += static_cast<double>(it->second) / std::log2(static_cast<double>(i) + 2.0);
    }
    std::vector<int> gains;
    for (const auto& [id, rel] : relevances) {
        if (rel > 0) gains.push_back(rel);
    }
    std::sort(gains.rbegin(), gains.rend());
    double idcg = 0.0;
    for (std::size_t i = 0; i < gains.size() && i < static_cast<std::size_t>(k); ++i) {
        idcg += static_cast<double>(gains[i]) / std::log2(static_cast<double>(i) + 2.0);
    }
    return idcg == 0.0 ? 0.0 : dcg / idcg;
}

double recall_at_k(std::span<const std::string> ranking,
                   const std::map<std::string, int>& relevances, int k) {
    require_positive(relevances, k);
    std::size_t total = 0;
    for (const auto& [id, rel] : relevances) {
        if (rel > 0) ++total;
    }
    const std::size_t cutoff = std::min<std::size_t>(ranking.size(), static_cast<std::size_t>(k));
    std::size_t hit = 0;
    for (std::size_t i = 0; i < cutoff; ++i) {
        auto it = relevances.find(ranking[i]);
        if (it != relevances.end() && it->second > 0) ++hit;
    }
    return static_cast<double>(hit) / static_cast<double>(total);
}

double mrr_at_k(std::span<const std::string> ranking,
                const std::map<std::string, int>& relevances, int k) {
    require_positive(relevances, k);
    const std::size_t cutoff = std::min<std::size_t>(ranking.size(), static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < cutoff; ++i) {
        auto it = relevances.find(ranking[i]);
        if (it != relevances.end() && it->second > 0) {
            return 1.0 / static_cast<double>(i + 1);
        }
    }
    return 0.0;
}

double accuracy_at_k(std::span<const std::string> ranking,
                     const std::map<std::string, int>& relevances, int k) {
    require_positive(relevances, k);
    const std::size_t cutoff = std::min<std::size_t>(ranking.size(), static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < cutoff; ++i) {
        auto it = relevances.find(ranking[i]);
        if (it != relevances.end() && it->second > 0) return 1.0;
    }
    return 0.0;
}

}  // namespace metrics

std::map<std::string, int> QrelsEntry::relevance_map() const {
    std::map<std::string, int> out;
    for (const auto& [id, rel] : relevant) out[id] = rel;
    return out;
}

bool QrelsEntry::has_positive() const {
    return std::any_of(relevant.begin(), relevant.end(),
                       [](const auto& p) { return p.second > 0; });
}

Qrels Qrels::load_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open qrels file: " + path.string());
    Qrels qrels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " +
                                     e.what());
        }
        QrelsEntry entry;
        entry.qid = j.contains("qid") && j["qid"].is_string()
                        ? j["qid"].get<std::string>()
                        : std::to_string(line_no);
        entry.query = j.at("query").get<std::string>();
        std::map<std::string, bool> seen;
        for (const auto& r : j.at("relevant")) {
            std::string id = r.at("id").get<std::string>();
            if (seen[id]) {
                throw std::runtime_error("duplicate item id in qrels query " + entry.qid);
            }
            seen[id] = true;
            int rel = r.value("rel", 1);
            if (rel < 0) rel = 0;
            entry.relevant.emplace_back(std::move(id), rel);
        }
        qrels.queries.push_back(std::move(entry));
    }
    return qrels;
}

void Qrels::save_jsonl(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write qrels file: " + path.string());
    for (const QrelsEntry& entry : queries) {
        nlohmann::ordered_json j;
        j["qid"] = entry.qid;
        j["query"] = entry.query;
        j["relevant"] = nlohmann::ordered_json::array();
        for (const auto& [id, rel] : entry.relevant) {
            j["relevant"].push_back({{"id", id}, {"rel", rel}});
        }
        out << j.dump() << '\n';
    }
}

std::string node_item_id(const Node& node) {
    std::string module = node.kind == NodeKind::Module ? node.name : node.module_name;
    std::string name = node.name;
    if ((node.kind == NodeKind::Method || node.kind == NodeKind::Field) &&
        !node.class_name.empty()) {
        name = node.class_name + "." + name;
    }
    return module + "::" + std::string(to_string(node.kind)) + "::" + name;
}

}  // namespace ranger

#include <algorithm>
#include <map>

#include "ranger/cypher.hpp"

namespace ranger::cypher {

namespace {

struct Row {
    std::vector<NodeId> positions;          // every pattern position, in clause order
    std::map<std::string, NodeId> vars;     // kNoNode = bound to null by OPTIONAL
};

bool node_matches(const CodeGraph& graph, NodeId id, const NodePattern& pattern) {
    const Node& n = graph.node(id);
    if (!pattern.label.empty()) {
        auto kind = node_kind_from(pattern.label);
        if (!kind || n.kind != *kind) return false;  // unknown label: no match
    }
    for (const auto& [key, want] : pattern.props) {
        auto have = node_property(n, key);
        if (!have || *have != want) return false;
    }
    return true;
}

// Candidate start nodes for a pattern, cheapest index first.
std::vector<NodeId> seed_candidates(const CodeGraph& graph, const NodePattern& pattern) {
    if (!pattern.label.empty()) {
        auto kind = node_kind_from(pattern.label);
        if (!kind) return {};
        for (const auto& [key, value] : pattern.props) {
            if (key == "name") {
                auto ids = graph.find(*kind, value);
                std::vector<NodeId> out;
                for (NodeId id : ids) {
                    if (node_matches(graph, id, pattern)) out.push_back(id);
                }
                return out;
            }
        }
    }
    std::vector<NodeId> out;
    for (NodeId id : graph.node_ids()) {
        if (node_matches(graph, id, pattern)) out.push_back(id);
    }
    return out;
}

class Executor {
  public:
    explicit Executor(const CodeGraph& graph) : graph_(graph) {}

    ResultTable run(const QueryPlan& plan) {
        ResultTable table;
        bool all_distinct = true;
        for (const MatchBlock& block : plan.branches) all_distinct &= block.distinct;
        for (const ReturnItem& item : plan.branches.front().items) {
            table.columns.push_back(item.column_name());
        }
        for (const MatchBlock& block : plan.branches) run_block(block, table);
        if (plan.branches.size() > 1 && all_distinct) dedupe(table);
        return table;
    }

  private:
    const CodeGraph& graph_;

    void run_block(const MatchBlock& block, ResultTable& table) {
        std::vector<Row> rows{Row{}};
        for (const MatchClause& clause : block.clauses) {
            rows = extend(rows, clause);
        }
        std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
            return a.positions < b.positions;
        });

        ResultTable local;
        for (const Row& row : rows) {
            std::vector<Value> out;
            for (const ReturnItem& item : block.items) {
                out.push_back(render(row, item));
            }
            local.rows.push_back(std::move(out));
            local.bindings.push_back(row.positions);
        }
        if (block.distinct) dedupe(local);
        for (std::size_t i = 0; i < local.rows.size(); ++i) {
            table.rows.push_back(std::move(local.rows[i]));
            table.bindings.push_back(std::move(local.bindings[i]));
        }
    }

    Value render(const Row& row, const ReturnItem& item) const {
        auto it = row.vars.find(item.var);
        const NodeId id = it == row.vars.end() ? kNoNode : it->second;
        if (id == kNoNode) return std::monostate{};
        switch (item.kind) {
            case ReturnItem::Kind::Var:
                return id;
            case ReturnItem::Kind::Prop: {
                auto value = node_property(graph_.node(id), item.prop);
                if (!value) return std::monostate{};
                return *value;
            }
            case ReturnItem::Kind::Labels:
                return std::vector<std::string>{std::string(to_string(graph_.node(id).kind))};
        }
        return std::monostate{};
    }

    std::vector<Row> extend(const std::vector<Row>& rows, const MatchClause& clause) const {
        std::vector<Row> out;
        for (const Row& row : rows) {
            std::vector<Row> matched;
            match_chain(row, clause, 0, row, matched);
            if (!matched.empty()) {
                out.insert(out.end(), matched.begin(), matched.end());
            } else if (clause.optional) {
                Row kept = row;
                for (const NodePattern& node : clause.nodes) {
                    kept.positions.push_back(kNoNode);
                    if (!node.var.empty() && !kept.vars.contains(node.var)) {
                        kept.vars[node.var] = kNoNode;
                    }
                }
                out.push_back(std::move(kept));
            }
        }
        return out;
    }

    // Depth-first extension over the chain positions.
    void match_chain(const Row& base, const MatchClause& clause, std::size_t pos,
                     Row current, std::vector<Row>& out) const {
        if (pos == clause.nodes.size()) {
            out.push_back(std::move(current));
            return;
        }
        const NodePattern& pattern = clause.nodes[pos];

        auto try_candidate = [&](NodeId id) {
            if (!node_matches(graph_, id, pattern)) return;
            if (!pattern.var.empty()) {
                auto bound = current.vars.find(pattern.var);
                if (bound != current.vars.end() && bound->second != id) return;
            }
            Row next = current;
            next.positions.push_back(id);
            if (!pattern.var.empty()) next.vars[pattern.var] = id;
            match_chain(base, clause, pos + 1, std::move(next), out);
        };

        if (pos == 0) {
            if (!pattern.var.empty()) {
                auto bound = current.vars.find(pattern.var);
                if (bound != current.vars.end()) {
                    if (bound->second != kNoNode) try_candidate(bound->second);
                    return;
                }
            }
            for (NodeId id : seed_candidates(graph_, pattern)) try_candidate(id);
            return;
        }

        const RelPattern& rel = clause.rels[pos - 1];
        const NodeId from = current.positions.back();
        std::vector<EdgeKind> kinds;
        if (!rel.kind.empty()) {
            auto kind = edge_kind_from(rel.kind);
            if (!kind) return;  // unknown edge kind: no matches
            kinds.push_back(*kind);
        }
        const Direction dir = rel.forward ? Direction::Out : Direction::In;
        for (const auto& [nbr, kind] : graph_.neighbors(from, dir, kinds)) {
            (void)kind;
            try_candidate(nbr);
        }
    }

    static void dedupe(ResultTable& table) {
        std::vector<std::vector<Value>> rows;
        std::vector<std::vector<NodeId>> bindings;
        for (std::size_t i = 0; i < table.rows.size(); ++i) {
            bool seen = false;
            for (const auto& prev : rows) {
                if (prev == table.rows[i]) {
                    seen = true;
                    break;
                }
            }
            if (!seen) {
                rows.push_back(table.rows[i]);
                bindings.push_back(table.bindings[i]);
            }
        }
        table.rows = std::move(rows);
        table.bindings = std::move(bindings);
    }
};

}  // namespace

std::optional<std::string> node_property(const Node& node, std::string_view name) {
    const std::string* value = nullptr;
    if (name == "name") value = &node.name;
    else if (name == "local_name") value = &node.local_name;
    else if (name == "signature") value = &node.signature;
    else if (name == "code") value = &node.code;
    else if (name == "module_name") value = &node.module_name;
    else if (name == "class") value = &node.class_name;
    else if (name == "module") value = &node.import_module;
    else if (name == "alias") value = &node.import_alias;
    else if (name == "dotted_folder_name") value = &node.dotted_folder_name;
    else if (name == "importer") value = &node.importer;
    else if (name == "description") value = &node.description;
    else if (name == "member_descriptions") value = &node.member_descriptions;
    if (value == nullptr || value->empty()) return std::nullopt;
    return *value;
}

nlohmann::ordered_json ResultTable::to_json(const CodeGraph& graph) const {
    nlohmann::ordered_json j;
    j["columns"] = columns;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : rows) {
        nlohmann::ordered_json jr = nlohmann::ordered_json::array();
        for (const Value& v : row) {
            if (std::holds_alternative<std::monostate>(v)) {
                jr.push_back(nullptr);
            } else if (std::holds_alternative<std::string>(v)) {
                jr.push_back(std::get<std::string>(v));
            } else if (std::holds_alternative<NodeId>(v)) {
                const Node& n = graph.node(std::get<NodeId>(v));
                nlohmann::ordered_json stub;
                stub["kind"] = to_string(n.kind);
                stub["name"] = n.name;
                if (!n.module_name.empty()) stub["module_name"] = n.module_name;
                jr.push_back(std::move(stub));
            } else {
                jr.push_back(std::get<std::vector<std::string>>(v));
            }
        }
        j["rows"].push_back(std::move(jr));
    }
    return j;
}

ResultTable execute(const CodeGraph& graph, const QueryPlan& plan) {
    Executor executor(graph);
    return executor.run(plan);
}

ResultTable run_entity_query(const CodeGraph& graph, std::string_view text) {
    return execute(graph, parse_cypher(text));
}

}  // namespace ranger::cypher

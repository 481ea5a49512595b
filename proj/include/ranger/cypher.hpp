#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ranger/graph.hpp"

namespace ranger::cypher {

class SyntaxError : public std::runtime_error {
  public:
    SyntaxError(std::size_t position, const std::string& expected)
        : std::runtime_error("syntax error at offset " + std::to_string(position) +
                             ": expected " + expected),
          position_(position),
          expected_(expected) {}
    std::size_t position() const { return position_; }
    const std::string& expected() const { return expected_; }

  private:
    std::size_t position_;
    std::string expected_;
};

class UnsupportedConstruct : public std::runtime_error {
  public:
    UnsupportedConstruct(std::size_t position, const std::string& construct)
        : std::runtime_error("unsupported construct at offset " + std::to_string(position) +
                             ": " + construct),
          position_(position),
          construct_(construct) {}
    std::size_t position() const { return position_; }
    const std::string& construct() const { return construct_; }

  private:
    std::size_t position_;
    std::string construct_;
};

struct NodePattern {
    std::string var;    // may be empty (anonymous)
    std::string label;  // may be empty (any kind); unknown labels match nothing
    std::vector<std::pair<std::string, std::string>> props;  // equality on string literals
};

struct RelPattern {
    std::string kind;     // empty = any edge kind
    bool forward = true;  // -[..]-> vs <-[..]-
};

struct MatchClause {
    bool optional = false;
    std::vector<NodePattern> nodes;
    std::vector<RelPattern> rels;  // rels.size() == nodes.size() - 1
};

struct ReturnItem {
    enum class Kind { Var, Prop, Labels };
    Kind kind = Kind::Var;
    std::string var;
    std::string prop;   // Kind::Prop
    std::string alias;  // AS name

    std::string column_name() const;
};

struct MatchBlock {
    std::vector<MatchClause> clauses;
    bool distinct = false;
    std::vector<ReturnItem> items;
};

// Parsed query: one block per UNION branch.
struct QueryPlan {
    std::vector<MatchBlock> branches;
};

QueryPlan parse_cypher(std::string_view text);

// Result cell: null, a string, a node reference, or a label list.
using Value = std::variant<std::monostate, std::string, NodeId, std::vector<std::string>>;

struct ResultTable {
    std::vector<std::string> columns;
    std::vector<std::vector<Value>> rows;
    // Per-row node bindings in pattern order (kNoNode for unmatched OPTIONAL
    // positions). Parallel to `rows`; not serialized.
    std::vector<std::vector<NodeId>> bindings;

    bool empty() const { return rows.empty(); }
    nlohmann::ordered_json to_json(const CodeGraph& graph) const;
};

// All homomorphic matches of the plan against the graph. Unknown labels and
// edge kinds yield empty matches, not errors.
ResultTable execute(const CodeGraph& graph, const QueryPlan& plan);

ResultTable run_entity_query(const CodeGraph& graph, std::string_view text);

// Property lookup used by the executor and result rendering; empty-valued
// properties count as absent.
std::optional<std::string> node_property(const Node& node, std::string_view name);

}  // namespace ranger::cypher

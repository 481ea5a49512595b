#include <algorithm>
#include <cctype>
#include <set>

#include "ranger/cypher.hpp"

namespace ranger::cypher {

namespace {

enum class LexKind { Ident, String, Punct, End };

struct LexToken {
    LexKind kind = LexKind::End;
    std::string text;   // identifier text or punctuation; string value for String
    std::string upper;  // uppercased identifier (keyword comparison)
    std::size_t pos = 0;
};

const std::set<std::string> kUnsupported = {
    "CREATE", "MERGE", "DELETE", "DETACH", "SET",    "REMOVE", "WHERE",  "WITH",
    "UNWIND", "CALL",  "ORDER",  "SKIP",   "LIMIT",  "FOREACH", "LOAD",  "USING",
};

std::vector<LexToken> lex(std::string_view text) {
    std::vector<LexToken> out;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        const char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t b = i;
            while (i < n && (std::isalnum(static_cast<unsigned char>(text[i])) ||
                             text[i] == '_')) {
                ++i;
            }
            LexToken t;
            t.kind = LexKind::Ident;
            t.text = std::string(text.substr(b, i - b));
            t.upper = t.text;
            std::transform(t.upper.begin(), t.upper.end(), t.upper.begin(),
                           [](unsigned char ch) { return std::toupper(ch); });
            t.pos = b;
            out.push_back(std::move(t));
            continue;
        }
        if (c == '\'') {
            std::size_t b = i;
            ++i;
            std::string value;
            bool closed = false;
            while (i < n) {
                if (text[i] == '\\' && i + 1 < n) {
                    const char esc = text[i + 1];
                    if (esc == 'n') {
                        value += '\n';
                    } else if (esc == 't') {
                        value += '\t';
                    } else {
                        value += esc;  // \' \\ and anything else: literal
                    }
                    i += 2;
                    continue;
                }
                if (text[i] == '\'') {
                    ++i;
                    closed = true;
                    break;
                }
                value += text[i];
                ++i;
            }
            if (!closed) throw SyntaxError(b, "closing single quote");
            out.push_back(LexToken{LexKind::String, std::move(value), "", b});
            continue;
        }
        if (c == '"') throw UnsupportedConstruct(i, "double-quoted string");
        if (c == '-' && i + 1 < n && text[i + 1] == '>') {
            out.push_back(LexToken{LexKind::Punct, "->", "", i});
            i += 2;
            continue;
        }
        if (c == '<' && i + 1 < n && text[i + 1] == '-') {
            out.push_back(LexToken{LexKind::Punct, "<-", "", i});
            i += 2;
            continue;
        }
        if (std::string_view("(){}[]:,.-=*").find(c) != std::string_view::npos) {
            out.push_back(LexToken{LexKind::Punct, std::string(1, c), "", i});
            ++i;
            continue;
        }
        throw SyntaxError(i, "a query token");
    }
    out.push_back(LexToken{LexKind::End, "", "", n});
    return out;
}

class PlanParser {
  public:
    explicit PlanParser(std::string_view text) : toks_(lex(text)) {}

    QueryPlan parse() {
        QueryPlan plan;
        plan.branches.push_back(parse_block());
        while (is_keyword("UNION")) {
            advance();
            if (is_keyword("ALL")) throw UnsupportedConstruct(cur().pos, "UNION ALL");
            plan.branches.push_back(parse_block());
        }
        if (cur().kind != LexKind::End) {
            if (cur().kind == LexKind::Ident && kUnsupported.contains(cur().upper)) {
                throw UnsupportedConstruct(cur().pos, cur().text);
            }
            throw SyntaxError(cur().pos, "UNION or end of query");
        }
        check_union_columns(plan);
        return plan;
    }

  private:
    std::vector<LexToken> toks_;
    std::size_t pos_ = 0;

    const LexToken& cur() const { return toks_[pos_]; }
    void advance() {
        if (pos_ + 1 < toks_.size()) ++pos_;
    }
    bool is_keyword(std::string_view kw) const {
        return cur().kind == LexKind::Ident && cur().upper == kw;
    }
    bool is_punct(std::string_view p) const {
        return cur().kind == LexKind::Punct && cur().text == p;
    }
    void expect_punct(std::string_view p) {
        if (!is_punct(p)) throw SyntaxError(cur().pos, "'" + std::string(p) + "'");
        advance();
    }
    std::string expect_ident(const char* what) {
        if (cur().kind != LexKind::Ident) throw SyntaxError(cur().pos, what);
        std::string name = cur().text;
        advance();
        return name;
    }

    void reject_unsupported() const {
        if (cur().kind == LexKind::Ident && kUnsupported.contains(cur().upper)) {
            throw UnsupportedConstruct(cur().pos, cur().text);
        }
    }

    MatchBlock parse_block() {
        MatchBlock block;
        reject_unsupported();
        if (!is_keyword("MATCH") && !is_keyword("OPTIONAL")) {
            throw SyntaxError(cur().pos, "MATCH");
        }
        while (is_keyword("MATCH") || is_keyword("OPTIONAL")) {
            MatchClause clause;
            if (is_keyword("OPTIONAL")) {
                clause.optional = true;
                advance();
                if (!is_keyword("MATCH")) throw SyntaxError(cur().pos, "MATCH after OPTIONAL");
            }
            advance();  // MATCH
            parse_chain(clause);
            block.clauses.push_back(std::move(clause));
            reject_unsupported();
        }
        if (!is_keyword("RETURN")) throw SyntaxError(cur().pos, "RETURN");
        advance();
        if (is_keyword("DISTINCT")) {
            block.distinct = true;
            advance();
        }
        block.items.push_back(parse_return_item());
        while (is_punct(",")) {
            advance();
            block.items.push_back(parse_return_item());
        }
        validate_block(block);
        return block;
    }

    void parse_chain(MatchClause& clause) {
        clause.nodes.push_back(parse_node_pattern());
        while (is_punct("-") || is_punct("<-")) {
            RelPattern rel;
            rel.forward = is_punct("-");
            advance();
            expect_punct("[");
            // Optional relationship variable (not bindable in this subset).
            if (cur().kind == LexKind::Ident) advance();
            if (is_punct(":")) {
                advance();
                rel.kind = expect_ident("relationship type");
            }
            expect_punct("]");
            if (rel.forward) {
                expect_punct("->");
            } else {
                expect_punct("-");
            }
            clause.rels.push_back(rel);
            clause.nodes.push_back(parse_node_pattern());
        }
    }

    NodePattern parse_node_pattern() {
        NodePattern node;
        expect_punct("(");
        if (cur().kind == LexKind::Ident) {
            node.var = cur().text;
            advance();
        }
        if (is_punct(":")) {
            advance();
            node.label = expect_ident("node label");
        }
        if (is_punct("{")) {
            advance();
            while (true) {
                std::string key = expect_ident("property name");
                expect_punct(":");
                if (cur().kind != LexKind::String) {
                    throw SyntaxError(cur().pos, "single-quoted string literal");
                }
                node.props.emplace_back(std::move(key), cur().text);
                advance();
                if (is_punct(",")) {
                    advance();
                    continue;
                }
                break;
            }
            expect_punct("}");
        }
        expect_punct(")");
        return node;
    }

    ReturnItem parse_return_item() {
        reject_unsupported();
        ReturnItem item;
        if (cur().kind != LexKind::Ident) throw SyntaxError(cur().pos, "a return expression");
        std::string first = cur().text;
        std::string upper = cur().upper;
        std::size_t at = cur().pos;
        advance();
        if (upper == "LABELS" && is_punct("(")) {
            advance();
            item.kind = ReturnItem::Kind::Labels;
            item.var = expect_ident("variable");
            expect_punct(")");
        } else if (is_punct("(")) {
            throw UnsupportedConstruct(at, "function " + first);
        } else if (is_punct(".")) {
            advance();
            item.kind = ReturnItem::Kind::Prop;
            item.var = std::move(first);
            item.prop = expect_ident("property name");
        } else {
            item.kind = ReturnItem::Kind::Var;
            item.var = std::move(first);
        }
        if (is_keyword("AS")) {
            advance();
            item.alias = expect_ident("alias");
        }
        return item;
    }

    void validate_block(const MatchBlock& block) {
        std::set<std::string> bound;
        for (const MatchClause& clause : block.clauses) {
            for (const NodePattern& node : clause.nodes) {
                if (!node.var.empty()) bound.insert(node.var);
            }
        }
        for (const ReturnItem& item : block.items) {
            if (!bound.contains(item.var)) {
                throw SyntaxError(0, "RETURN references unbound variable '" + item.var + "'");
            }
        }
    }

    void check_union_columns(const QueryPlan& plan) {
        if (plan.branches.size() < 2) return;
        auto names = [](const MatchBlock& b) {
            std::vector<std::string> out;
            for (const ReturnItem& item : b.items) out.push_back(item.column_name());
            return out;
        };
        auto first = names(plan.branches.front());
        for (std::size_t i = 1; i < plan.branches.size(); ++i) {
            if (names(plan.branches[i]) != first) {
                throw SyntaxError(0, "UNION branches with identical column names");
            }
        }
    }
};

}  // namespace

std::string ReturnItem::column_name() const {
    if (!alias.empty()) return alias;
    switch (kind) {
        case Kind::Var: return var;
        case Kind::Prop: return var + "." + prop;
        case Kind::Labels: return "labels(" + var + ")";
    }
    return var;
}

QueryPlan parse_cypher(std::string_view text) {
    PlanParser parser(text);
    return parser.parse();
}

}  // namespace ranger::cypher

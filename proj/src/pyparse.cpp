#include <algorithm>
#include <unordered_set>

#include "ranger/grammar.hpp"

namespace ranger {

namespace {

const std::unordered_set<std::string_view> kCompoundKeywords = {
    "if", "elif", "else", "for", "while", "try", "except",
    "finally", "with", "match", "case", "async",
};

class Parser {
  public:
    explicit Parser(const std::vector<Token>& tokens) : toks_(tokens) {}

    CstNode parse_module() {
        CstNode root;
        root.kind = CstKind::Module;
        root.tok_begin = 0;
        while (!at_end()) {
            parse_statements(root.children);
            if (cur().kind == TokKind::Dedent) advance();  // stray dedent; tolerate
        }
        root.tok_end = pos_;
        finalize(root);
        return root;
    }

    bool had_errors() const { return had_errors_; }

  private:
    const std::vector<Token>& toks_;
    std::size_t pos_ = 0;
    bool had_errors_ = false;

    const Token& cur() const { return toks_[pos_]; }
    bool at_end() const { return cur().kind == TokKind::End; }
    bool is_op(std::string_view s) const { return cur().kind == TokKind::Op && cur().text == s; }
    bool is_name(std::string_view s) const {
        return cur().kind == TokKind::Name && cur().text == s;
    }
    void advance() {
        if (!at_end()) ++pos_;
    }

    // Consume tokens through the next NEWLINE (the tokenizer only emits
    // NEWLINE at bracket depth zero, so this is one logical line).
    void skip_logical_line() {
        while (!at_end() && cur().kind != TokKind::Newline) advance();
        if (cur().kind == TokKind::Newline) advance();
    }

    // Consume a balanced INDENT..DEDENT region, if present.
    void skip_indented_block() {
        if (cur().kind != TokKind::Indent) return;
        int depth = 0;
        do {
            if (cur().kind == TokKind::Indent) ++depth;
            if (cur().kind == TokKind::Dedent) --depth;
            advance();
        } while (!at_end() && depth > 0);
    }

    CstNode make_error(std::size_t begin) {
        had_errors_ = true;
        CstNode node;
        node.kind = CstKind::Error;
        node.tok_begin = begin;
        skip_logical_line();
        skip_indented_block();
        node.tok_end = pos_;
        finalize(node);
        return node;
    }

    void parse_statements(std::vector<CstNode>& out) {
        while (!at_end() && cur().kind != TokKind::Dedent) {
            if (cur().kind == TokKind::Newline) {
                advance();
                continue;
            }
            if (cur().kind == TokKind::Indent) {
                // Unexpected indentation; swallow the region as one error.
                out.push_back(make_error(pos_));
                continue;
            }
            parse_statement(out);
        }
    }

    void parse_statement(std::vector<CstNode>& out) {
        const std::size_t start = pos_;

        if (is_op("@")) {
            // Decorators, then a def/class they belong to.
            while (is_op("@")) skip_logical_line();
            if (is_name("def") || is_name("class") ||
                (is_name("async") && peek_is_name(1, "def"))) {
                parse_def_or_class(out, start);
            } else {
                out.push_back(make_error(start));
            }
            return;
        }
        if (is_name("def") || is_name("class") || (is_name("async") && peek_is_name(1, "def"))) {
            parse_def_or_class(out, start);
            return;
        }
        if (is_name("import")) {
            parse_plain_import(out);
            return;
        }
        if (is_name("from")) {
            parse_from_import(out);
            return;
        }
        if (cur().kind == TokKind::Name && kCompoundKeywords.contains(cur().text) &&
            line_has_block_colon()) {
            parse_compound(out);
            return;
        }
        parse_simple_line(out);
    }

    bool peek_is_name(std::size_t ahead, std::string_view s) const {
        std::size_t p = pos_ + ahead;
        return p < toks_.size() && toks_[p].kind == TokKind::Name && toks_[p].text == s;
    }

    // Does the current logical line contain a ':' at bracket depth 0
    // (a compound-statement header)?
    bool line_has_block_colon() const {
        int depth = 0;
        for (std::size_t p = pos_; p < toks_.size(); ++p) {
            const Token& t = toks_[p];
            if (t.kind == TokKind::Newline || t.kind == TokKind::End) return false;
            if (t.kind == TokKind::Op) {
                if (t.text == "(" || t.text == "[" || t.text == "{") ++depth;
                if (t.text == ")" || t.text == "]" || t.text == "}") --depth;
                if (t.text == ":" && depth == 0) return true;
                if (t.text == "=" && depth == 0) return false;  // assignment wins
            }
            if (t.kind == TokKind::Name && t.text == "lambda") return false;
        }
        return false;
    }

    void parse_def_or_class(std::vector<CstNode>& out, std::size_t start) {
        CstNode node;
        node.tok_begin = start;
        node.header_tok_begin = pos_;
        if (is_name("async")) advance();
        const bool is_class = is_name("class");
        node.kind = is_class ? CstKind::ClassDef : CstKind::FunctionDef;
        node.sig_begin = toks_[node.header_tok_begin].begin;
        node.header_line = cur().line;
        advance();  // def | class

        if (cur().kind != TokKind::Name) {
            out.push_back(make_error(start));
            return;
        }
        node.name = cur().text;
        advance();

        if (is_class) {
            if (is_op("(")) parse_base_list(node);
        } else {
            if (is_op("(")) {
                parse_param_list(node);
            }
        }

        // Header runs to the ':' at depth 0 (return annotations included).
        int depth = 0;
        while (!at_end() && cur().kind != TokKind::Newline) {
            if (cur().kind == TokKind::Op) {
                if (cur().text == "(" || cur().text == "[" || cur().text == "{") ++depth;
                if (cur().text == ")" || cur().text == "]" || cur().text == "}") --depth;
                if (cur().text == ":" && depth == 0) break;
            }
            advance();
        }
        if (!is_op(":")) {
            out.push_back(make_error(start));
            return;
        }
        node.sig_end = cur().begin;
        advance();  // ':'
        node.body_tok_begin = pos_;
        parse_suite(node.children);
        node.tok_end = pos_;
        finalize(node);
        out.push_back(std::move(node));
    }

    void parse_base_list(CstNode& node) {
        advance();  // '('
        int depth = 1;
        std::string segment;
        bool has_kwarg = false;
        bool starred = false;
        bool first_token = true;
        auto flush = [&] {
            if (!segment.empty() && !has_kwarg && !starred) node.bases.push_back(segment);
            segment.clear();
            has_kwarg = false;
            starred = false;
            first_token = true;
        };
        while (!at_end() && cur().kind != TokKind::Newline) {
            if (cur().kind == TokKind::Op) {
                const std::string& op = cur().text;
                if (op == "(" || op == "[" || op == "{") ++depth;
                if (op == ")" || op == "]" || op == "}") {
                    --depth;
                    if (depth == 0) {
                        flush();
                        advance();
                        return;
                    }
                }
                if (op == "," && depth == 1) {
                    flush();
                    advance();
                    continue;
                }
                if (op == "=" && depth == 1) has_kwarg = true;
                if ((op == "*" || op == "**") && depth == 1 && first_token) starred = true;
            }
            segment += cur().text;
            first_token = false;
            advance();
        }
        flush();  // unbalanced header; keep what we saw
    }

    void parse_param_list(CstNode& node) {
        advance();  // '('
        int depth = 1;
        bool want_name = true;  // at the start of a parameter segment
        while (!at_end()) {
            if (cur().kind == TokKind::Op) {
                const std::string& op = cur().text;
                if (op == "(" || op == "[" || op == "{") {
                    ++depth;
                } else if (op == ")" || op == "]" || op == "}") {
                    --depth;
                    if (depth == 0) {
                        advance();
                        return;
                    }
                } else if (op == "," && depth == 1) {
                    want_name = true;
                } else if ((op == "*" || op == "**" || op == "/") && depth == 1) {
                    // positional/keyword markers keep the segment open
                } else if (depth == 1 && (op == ":" || op == "=")) {
                    want_name = false;  // annotation or default follows
                }
                advance();
                continue;
            }
            if (cur().kind == TokKind::Name && depth == 1 && want_name) {
                node.params.push_back(cur().text);
                want_name = false;
            }
            advance();
        }
    }

    void parse_suite(std::vector<CstNode>& out) {
        if (cur().kind == TokKind::Newline) {
            advance();
            if (cur().kind != TokKind::Indent) return;  // empty/missing body
            advance();
            parse_statements(out);
            if (cur().kind == TokKind::Dedent) advance();
            return;
        }
        // Inline suite: simple statements on the header line.
        while (!at_end() && cur().kind != TokKind::Newline) {
            parse_simple_segment(out);
            if (is_op(";")) advance();
        }
        if (cur().kind == TokKind::Newline) advance();
    }

    void parse_compound(std::vector<CstNode>& out) {
        CstNode node;
        node.kind = CstKind::Block;
        node.tok_begin = pos_;
        node.header_line = cur().line;
        int depth = 0;
        while (!at_end() && cur().kind != TokKind::Newline) {
            if (cur().kind == TokKind::Op) {
                if (cur().text == "(" || cur().text == "[" || cur().text == "{") ++depth;
                if (cur().text == ")" || cur().text == "]" || cur().text == "}") --depth;
                if (cur().text == ":" && depth == 0) break;
            }
            advance();
        }
        if (!is_op(":")) {
            out.push_back(make_error(node.tok_begin));
            return;
        }
        advance();
        node.body_tok_begin = pos_;
        parse_suite(node.children);
        node.tok_end = pos_;
        finalize(node);
        out.push_back(std::move(node));
    }

    void parse_plain_import(std::vector<CstNode>& out) {
        CstNode node;
        node.kind = CstKind::Import;
        node.tok_begin = pos_;
        advance();  // import
        while (!at_end() && cur().kind != TokKind::Newline) {
            std::string dotted = parse_dotted_name();
            if (dotted.empty()) break;
            ImportItem item;
            item.name = dotted;
            item.module = dotted;
            item.plain = true;
            if (is_name("as")) {
                advance();
                if (cur().kind == TokKind::Name) {
                    item.alias = cur().text;
                    advance();
                }
            }
            node.imports.push_back(std::move(item));
            if (is_op(",")) {
                advance();
                continue;
            }
            break;
        }
        skip_logical_line();
        node.tok_end = pos_;
        finalize(node);
        out.push_back(std::move(node));
    }

    void parse_from_import(std::vector<CstNode>& out) {
        CstNode node;
        node.kind = CstKind::ImportFrom;
        node.tok_begin = pos_;
        advance();  // from
        std::string module;
        while (is_op(".") || is_op("...")) {
            module += cur().text;
            advance();
        }
        module += parse_dotted_name();
        if (!is_name("import")) {
            out.push_back(make_error(node.tok_begin));
            return;
        }
        advance();  // import
        bool parens = false;
        if (is_op("(")) {
            parens = true;
            advance();
        }
        while (!at_end() && cur().kind != TokKind::Newline) {
            if (is_op(")") && parens) {
                advance();
                break;
            }
            if (is_op("*")) {
                ImportItem item;
                item.name = "*";
                item.module = module;
                node.imports.push_back(std::move(item));
                advance();
            } else if (cur().kind == TokKind::Name) {
                ImportItem item;
                item.name = cur().text;
                item.module = module;
                advance();
                if (is_name("as")) {
                    advance();
                    if (cur().kind == TokKind::Name) {
                        item.alias = cur().text;
                        advance();
                    }
                }
                node.imports.push_back(std::move(item));
            } else {
                advance();  // stray token; tolerate
                continue;
            }
            if (is_op(",")) advance();
        }
        skip_logical_line();
        node.tok_end = pos_;
        finalize(node);
        out.push_back(std::move(node));
    }

    std::string parse_dotted_name() {
        std::string dotted;
        while (cur().kind == TokKind::Name) {
            dotted += cur().text;
            advance();
            if (is_op(".")) {
                dotted += '.';
                advance();
            } else {
                break;
            }
        }
        return dotted;
    }

    void parse_simple_line(std::vector<CstNode>& out) {
        while (!at_end() && cur().kind != TokKind::Newline) {
            parse_simple_segment(out);
            if (is_op(";")) advance();
        }
        if (cur().kind == TokKind::Newline) advance();
    }

    // One statement between ';' boundaries: an assignment or a plain
    // expression/keyword statement.
    void parse_simple_segment(std::vector<CstNode>& out) {
        CstNode node;
        node.kind = CstKind::Statement;
        node.tok_begin = pos_;
        node.header_line = cur().line;
        int depth = 0;
        std::vector<std::pair<std::size_t, std::size_t>> target_segments;  // [begin,end) token idx
        std::size_t segment_begin = pos_;
        bool is_assign = false;
        while (!at_end() && cur().kind != TokKind::Newline) {
            if (cur().kind == TokKind::Op) {
                const std::string& op = cur().text;
                if (op == "(" || op == "[" || op == "{") ++depth;
                if (op == ")" || op == "]" || op == "}") --depth;
                if (op == ";" && depth == 0) break;
                if (op == "=" && depth == 0) {
                    target_segments.emplace_back(segment_begin, pos_);
                    segment_begin = pos_ + 1;
                    is_assign = true;
                }
            }
            advance();
        }
        node.tok_end = pos_;
        if (is_assign) {
            node.kind = CstKind::Assign;
            for (auto [b, e] : target_segments) {
                collect_target_names(b, e, node.targets);
            }
        }
        finalize(node);
        if (node.tok_end > node.tok_begin) out.push_back(std::move(node));
    }

    // Simple binding targets only: plain names, tuple/list unpacking, and the
    // name ahead of an annotation. Attribute and subscript stores bind
    // nothing new.
    void collect_target_names(std::size_t begin, std::size_t end,
                              std::vector<std::string>& out) {
        if (begin >= end) return;
        // Annotated single target: NAME ':' ...
        if (toks_[begin].kind == TokKind::Name && begin + 1 < end &&
            toks_[begin + 1].kind == TokKind::Op && toks_[begin + 1].text == ":") {
            out.push_back(toks_[begin].text);
            return;
        }
        for (std::size_t p = begin; p < end; ++p) {
            const Token& t = toks_[p];
            if (t.kind == TokKind::Name) continue;
            if (t.kind == TokKind::Op &&
                (t.text == "," || t.text == "(" || t.text == ")" || t.text == "[" ||
                 t.text == "]" || t.text == "*")) {
                // Square brackets are only allowed as list-pattern delimiters,
                // i.e. not directly after a name (that would be a subscript).
                if ((t.text == "[") && p > begin && toks_[p - 1].kind == TokKind::Name) return;
                continue;
            }
            return;  // anything else: not a simple binding target
        }
        for (std::size_t p = begin; p < end; ++p) {
            if (toks_[p].kind == TokKind::Name) out.push_back(toks_[p].text);
        }
    }

    // Derive line extents from the token range.
    void finalize(CstNode& node) {
        int first = 0, last = 0;
        for (std::size_t p = node.tok_begin; p < node.tok_end && p < toks_.size(); ++p) {
            const Token& t = toks_[p];
            if (t.kind == TokKind::Newline || t.kind == TokKind::Indent ||
                t.kind == TokKind::Dedent || t.kind == TokKind::End) {
                continue;
            }
            if (first == 0) first = t.line;
            last = std::max(last, t.line);
        }
        // Multi-line tokens (triple-quoted strings) end past their start line.
        for (std::size_t p = node.tok_begin; p < node.tok_end && p < toks_.size(); ++p) {
            const Token& t = toks_[p];
            if (t.kind == TokKind::String) {
                int extra = static_cast<int>(std::count(t.text.begin(), t.text.end(), '\n'));
                last = std::max(last, t.line + extra);
            }
        }
        node.start_line = first;
        node.end_line = std::max(first, last);
        if (node.header_line == 0) node.header_line = node.start_line;
    }
};

}  // namespace

SyntaxTree PythonGrammar::parse(std::string_view text) const {
    SyntaxTree tree;
    tree.tokens = tokenize_python(text);
    Parser parser(tree.tokens);
    tree.root = parser.parse_module();
    tree.had_errors = parser.had_errors();
    // Module node covers the whole file.
    tree.root.start_line = 1;
    int last = 1;
    for (const Token& t : tree.tokens) {
        if (t.kind != TokKind::End) last = std::max(last, t.line);
    }
    tree.root.end_line = last;
    return tree;
}

const Grammar& python_grammar() {
    static PythonGrammar grammar;
    return grammar;
}

}  // namespace ranger

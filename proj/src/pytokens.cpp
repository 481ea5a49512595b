#include <array>
#include <cctype>

#include "ranger/grammar.hpp"

namespace ranger {

namespace {

bool is_name_start(unsigned char c) {
    return std::isalpha(c) || c == '_' || c >= 0x80;
}

bool is_name_char(unsigned char c) {
    return std::isalnum(c) || c == '_' || c >= 0x80;
}

bool is_string_prefix(std::string_view s) {
    if (s.size() > 2) return false;
    for (char c : s) {
        char l = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (l != 'r' && l != 'b' && l != 'u' && l != 'f') return false;
    }
    return !s.empty();
}

// Longest-match operator list; order within a length class is irrelevant.
constexpr std::array<std::string_view, 48> kOperators = {
    "**=", "//=", ">>=", "<<=", "...", "!=", ">=", "<=", "==", "->", ":=",
    "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "@=", "**", "//", "<<",
    ">>", "+", "-", "*", "/", "%", "@", "&", "|", "^", "~", "<", ">", "(",
    ")", "[", "]", "{", "}", ",", ":", ".", ";", "=", "!",
};

}  // namespace

std::vector<Token> tokenize_python(std::string_view text) {
    std::vector<Token> tokens;
    std::vector<int> indents{0};
    std::size_t i = 0;
    const std::size_t n = text.size();
    int line = 1;
    std::size_t line_start = 0;
    int paren_depth = 0;
    bool at_line_start = true;
    bool line_has_content = false;

    auto push = [&](TokKind kind, std::size_t begin, std::size_t end) {
        tokens.push_back(Token{kind, std::string(text.substr(begin, end - begin)), line,
                               static_cast<int>(begin - line_start), begin, end});
    };

    auto emit_newline = [&](std::size_t pos) {
        if (line_has_content) {
            tokens.push_back(Token{TokKind::Newline, "\n", line,
                                   static_cast<int>(pos - line_start), pos, pos});
            line_has_content = false;
        }
    };

    while (i < n) {
        if (at_line_start && paren_depth == 0) {
            // Measure indentation; blank and comment-only lines do not count.
            std::size_t j = i;
            int width = 0;
            while (j < n && (text[j] == ' ' || text[j] == '\t')) {
                width = text[j] == '\t' ? (width / 8 + 1) * 8 : width + 1;
                ++j;
            }
            if (j >= n || text[j] == '\n' || text[j] == '\r' || text[j] == '#') {
                // Skip to end of line without touching the indent stack.
                while (j < n && text[j] != '\n') ++j;
                if (j < n) ++j;
                ++line;
                line_start = j;
                i = j;
                continue;
            }
            if (width > indents.back()) {
                indents.push_back(width);
                tokens.push_back(Token{TokKind::Indent, "", line, 0, i, j});
            } else {
                while (width < indents.back()) {
                    indents.pop_back();
                    tokens.push_back(Token{TokKind::Dedent, "", line, 0, i, i});
                }
                if (width != indents.back()) {
                    // Inconsistent dedent; tolerate by opening a new level.
                    indents.push_back(width);
                }
            }
            i = j;
            at_line_start = false;
            continue;
        }

        char c = text[i];
        if (c == '\n') {
            if (paren_depth == 0) emit_newline(i);
            ++i;
            ++line;
            line_start = i;
            if (paren_depth == 0) at_line_start = true;
            continue;
        }
        if (c == '\r' || c == ' ' || c == '\t' || c == '\f') {
            ++i;
            continue;
        }
        if (c == '\\' && i + 1 < n && (text[i + 1] == '\n' || text[i + 1] == '\r')) {
            i += text[i + 1] == '\r' && i + 2 < n && text[i + 2] == '\n' ? 3 : 2;
            ++line;
            line_start = i;
            continue;
        }
        if (c == '#') {
            while (i < n && text[i] != '\n') ++i;
            continue;
        }

        line_has_content = true;

        if (is_name_start(static_cast<unsigned char>(c))) {
            std::size_t b = i;
            while (i < n && is_name_char(static_cast<unsigned char>(text[i]))) ++i;
            std::string_view word = text.substr(b, i - b);
            // String prefix directly attached to a quote?
            if (i < n && (text[i] == '\'' || text[i] == '"') && is_string_prefix(word)) {
                i = b;  // re-scan as string below
            } else {
                push(TokKind::Name, b, i);
                continue;
            }
        }

        if (c == '\'' || c == '"' ||
            (is_name_start(static_cast<unsigned char>(c)) && true)) {
            // String literal with optional prefix.
            std::size_t b = i;
            while (i < n && is_name_char(static_cast<unsigned char>(text[i]))) ++i;
            if (i < n && (text[i] == '\'' || text[i] == '"')) {
                char quote = text[i];
                bool triple = i + 2 < n && text[i + 1] == quote && text[i + 2] == quote;
                int start_line_no = line;
                if (triple) {
                    i += 3;
                    while (i < n) {
                        if (text[i] == '\n') {
                            ++line;
                            line_start = i + 1;
                        }
                        if (text[i] == '\\' && i + 1 < n) {
                            i += 2;
                            continue;
                        }
                        if (text[i] == quote && i + 2 < n && text[i + 1] == quote &&
                            text[i + 2] == quote) {
                            i += 3;
                            break;
                        }
                        if (text[i] == quote && i + 2 >= n) {
                            i = n;
                            break;
                        }
                        ++i;
                    }
                } else {
                    ++i;
                    while (i < n && text[i] != '\n') {
                        if (text[i] == '\\' && i + 1 < n) {
                            i += 2;
                            continue;
                        }
                        if (text[i] == quote) {
                            ++i;
                            break;
                        }
                        ++i;
                    }
                }
                tokens.push_back(Token{TokKind::String,
                                       std::string(text.substr(b, i - b)), start_line_no,
                                       static_cast<int>(b - line_start), b, i});
                continue;
            }
            i = b;  // fall through to operator handling
        }

        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
            std::size_t b = i;
            ++i;
            while (i < n) {
                char d = text[i];
                if (std::isalnum(static_cast<unsigned char>(d)) || d == '_' || d == '.') {
                    ++i;
                } else if ((d == '+' || d == '-') && i > b &&
                           (text[i - 1] == 'e' || text[i - 1] == 'E')) {
                    ++i;
                } else {
                    break;
                }
            }
            push(TokKind::Number, b, i);
            continue;
        }

        bool matched = false;
        for (std::string_view op : kOperators) {
            if (text.substr(i, op.size()) == op) {
                if (op == "(" || op == "[" || op == "{") ++paren_depth;
                if (op == ")" || op == "]" || op == "}") {
                    if (paren_depth > 0) --paren_depth;
                }
                push(TokKind::Op, i, i + op.size());
                i += op.size();
                matched = true;
                break;
            }
        }
        if (!matched) {
            push(TokKind::Op, i, i + 1);  // unknown byte: single-char operator
            ++i;
        }
    }

    emit_newline(n);
    while (indents.size() > 1) {
        indents.pop_back();
        tokens.push_back(Token{TokKind::Dedent, "", line, 0, n, n});
    }
    tokens.push_back(Token{TokKind::End, "", line, 0, n, n});
    return tokens;
}

}  // namespace ranger

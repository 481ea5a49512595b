#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ranger {

enum class TokKind { Name, Number, String, Op, Newline, Indent, Dedent, End };

struct Token {
    TokKind kind = TokKind::End;
    std::string text;
    int line = 0;  // 1-based
    int col = 0;   // 0-based
    std::size_t begin = 0;
    std::size_t end = 0;
};

// Indentation-aware token stream. Never fails: unterminated strings run to
// end of line (or end of file for triple quotes), unknown bytes become
// single-character operators.
std::vector<Token> tokenize_python(std::string_view text);

enum class CstKind {
    Module,
    ClassDef,
    FunctionDef,
    Assign,
    Import,
    ImportFrom,
    Block,      // compound statement (if/for/while/try/with/...) — children share scope
    Statement,  // any other simple statement
    Error,      // unparseable region
};

struct ImportItem {
    std::string name;    // imported symbol, "*" for star imports, dotted path for plain imports
    std::string module;  // module as written, including leading dots for relative imports
    std::string alias;
    bool plain = false;  // `import x.y` as opposed to `from m import x`
};

struct CstNode {
    CstKind kind = CstKind::Statement;
    std::string name;                 // ClassDef/FunctionDef
    std::vector<std::string> bases;   // ClassDef base expression texts
    std::vector<std::string> params;  // FunctionDef parameter names
    std::vector<std::string> targets; // Assign bound names (simple targets only)
    std::vector<ImportItem> imports;  // Import/ImportFrom

    int start_line = 0;   // first line, decorators included
    int end_line = 0;
    int header_line = 0;  // def/class line
    std::size_t sig_begin = 0, sig_end = 0;  // byte range of def/class header
    std::size_t tok_begin = 0, tok_end = 0;  // token index range (whole node)
    std::size_t header_tok_begin = 0;        // index of the def/class keyword token
    std::size_t body_tok_begin = 0;          // first token after the header colon

    std::vector<CstNode> children;
};

struct SyntaxTree {
    CstNode root;               // kind == Module
    std::vector<Token> tokens;  // shared token array referenced by tok ranges
    bool had_errors = false;
};

// Language grammar handle. Only Python ships; the parsing stage is the only
// language-specific part of the pipeline.
class Grammar {
  public:
    virtual ~Grammar() = default;
    virtual std::string_view language() const = 0;
    virtual SyntaxTree parse(std::string_view text) const = 0;
};

class PythonGrammar final : public Grammar {
  public:
    std::string_view language() const override { return "python"; }
    SyntaxTree parse(std::string_view text) const override;
};

const Grammar& python_grammar();

}  // namespace ranger

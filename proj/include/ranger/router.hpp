#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "ranger/cypher.hpp"
#include "ranger/encoders.hpp"
#include "ranger/graph.hpp"
#include "ranger/mcts.hpp"

namespace ranger {

struct TranslationResult {
    bool ok = false;
    std::string cypher;
    std::string diagnostic;  // set on failure

    static TranslationResult failure(std::string why) {
        TranslationResult r;
        r.diagnostic = std::move(why);
        return r;
    }
    static TranslationResult success(std::string text) {
        TranslationResult r;
        r.ok = true;
        r.cypher = std::move(text);
        return r;
    }
};

class QueryTranslator {
  public:
    virtual ~QueryTranslator() = default;
    virtual TranslationResult translate(const std::string& query, const CodeGraph& graph) = 0;
};

// Offline stand-in for the LLM translator: picks backtick / CamelCase /
// snake_case / dotted identifiers that exist in the graph's name index and
// emits an anchored MATCH with a one-hop OPTIONAL expansion.
class RuleBasedTranslator final : public QueryTranslator {
  public:
    TranslationResult translate(const std::string& query, const CodeGraph& graph) override;
};

// Wire translator: POST /translate {"system":...,"schema":...,"query":...}
// -> {"cypher":...}. The system prompt and schema description are loaded
// from the prompt asset directory and sent verbatim.
class HttpTranslator final : public QueryTranslator {
  public:
    HttpTranslator(std::string base_url, std::filesystem::path prompts_dir);
    TranslationResult translate(const std::string& query, const CodeGraph& graph) override;

  private:
    std::string base_url_;
    std::string system_prompt_;
    std::string schema_text_;
};

struct RetrievalResponse {
    enum class Path { Entity, Mcts };
    Path path = Path::Entity;
    cypher::ResultTable entity_rows;  // populated on the entity path
    SearchResult ranked;              // populated on the MCTS path
    struct Diagnostics {
        std::string translator_output;  // cypher text or failure reason
        std::string note;               // why the query fell through to MCTS
        double translate_ms = 0;
        double execute_ms = 0;
        double search_ms = 0;
    } diagnostics;

    nlohmann::ordered_json to_json(const CodeGraph& graph) const;
};

// Dual-path retrieval: translate -> execute; empty table, translation
// failure, or parse failure falls back to the MCTS traversal.
RetrievalResponse route(const CodeGraph& graph, const std::string& query_text,
                        QueryTranslator& translator, EmbedderClient& embedder,
                        RerankerClient& reranker, const SearchConfig& config);

}  // namespace ranger

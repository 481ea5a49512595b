#include "ranger/router.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <fstream>

#include "ranger/wire_clients.hpp"

namespace ranger {

namespace {

struct Candidate {
    std::string text;
    int priority;  // lower = stronger signal
};

bool has_upper_after_lower_or_start(const std::string& s) {
    bool has_upper = false, has_lower = false;
    for (char c : s) {
        if (std::isupper(static_cast<unsigned char>(c))) has_upper = true;
        if (std::islower(static_cast<unsigned char>(c))) has_lower = true;
    }
    return has_upper && has_lower;
}

// Identifier-ish substrings of the query, strongest signal first:
// backtick-quoted spans, then CamelCase words, then snake_case words, then
// dotted paths.
std::vector<Candidate> extract_identifiers(const std::string& query) {
    std::vector<Candidate> out;
    std::size_t i = 0;
    while ((i = query.find('`', i)) != std::string::npos) {
        std::size_t close = query.find('`', i + 1);
        if (close == std::string::npos) break;
        std::string inner = query.substr(i + 1, close - i - 1);
        if (!inner.empty()) out.push_back({inner, 0});
        i = close + 1;
    }
    std::string word;
    auto flush = [&] {
        if (word.empty()) return;
        if (word.find('.') != std::string::npos) {
            out.push_back({word, 3});
        } else if (word.find('_') != std::string::npos) {
            out.push_back({word, 2});
        } else if (has_upper_after_lower_or_start(word)) {
            out.push_back({word, 1});
        }
        word.clear();
    };
    for (char c : query) {
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.') {
            word += c;
        } else {
            flush();
        }
    }
    flush();
    std::stable_sort(out.begin(), out.end(),
                     [](const Candidate& a, const Candidate& b) { return a.priority < b.priority; });
    return out;
}

std::string quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\\' || c == '\'') out += '\\';
        out += c;
    }
    out += "'";
    return out;
}

std::string read_asset(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw BackendUnavailable("missing prompt asset: " + path.string());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

TranslationResult RuleBasedTranslator::translate(const std::string& query,
                                                 const CodeGraph& graph) {
    // (kind, name) preference order for ambiguous identifiers.
    constexpr NodeKind kKindOrder[] = {NodeKind::Class, NodeKind::Function, NodeKind::Method,
                                       NodeKind::Module, NodeKind::GlobalVariable,
                                       NodeKind::Field};
    for (const Candidate& cand : extract_identifiers(query)) {
        for (NodeKind kind : kKindOrder) {
            bool hit = !graph.find(kind, cand.text).empty();
            bool by_local_name = false;
            if (!hit && kind == NodeKind::Module && cand.text.find('.') == std::string::npos) {
                for (NodeId id : graph.node_ids()) {
                    const Node& n = graph.node(id);
                    if (n.kind == NodeKind::Module && n.local_name == cand.text) {
                        hit = true;
                        by_local_name = true;
                        break;
                    }
                }
            }
            if (!hit) continue;
            const std::string lit = quote(cand.text);
            switch (kind) {
                case NodeKind::Class:
                    return TranslationResult::success(
                        "MATCH (c:Class {name: " + lit + "}) "
                        "OPTIONAL MATCH (c)-[:HAS_METHOD]->(m) "
                        "OPTIONAL MATCH (c)-[:USES]->(dep) "
                        "RETURN c.name AS class, m.name AS method, dep.name AS dependency, "
                        "c, m, dep");
                case NodeKind::Function:
                    return TranslationResult::success(
                        "MATCH (f:Function {name: " + lit + "}) "
                        "OPTIONAL MATCH (f)-[:USES]->(dep) "
                        "RETURN DISTINCT dep.name AS name, dep.signature AS signature, "
                        "dep.code AS code, f, dep");
                case NodeKind::Method:
                    return TranslationResult::success(
                        "MATCH (c:Class)-[:HAS_METHOD]->(m:Method {name: " + lit + "}) "
                        "OPTIONAL MATCH (m)-[:USES]->(dep) "
                        "RETURN c.name AS class, m.name AS name, m.signature AS signature, "
                        "m, dep");
                case NodeKind::Module: {
                    const std::string prop = by_local_name ? "local_name" : "name";
                    return TranslationResult::success(
                        "MATCH (mod:Module {" + prop + ": " + lit + "}) "
                        "OPTIONAL MATCH (mod)-[:CONTAINS]->(member) "
                        "RETURN mod.name AS module, member.name AS name, member, mod");
                }
                case NodeKind::GlobalVariable:
                case NodeKind::Field:
                    return TranslationResult::success(
                        "MATCH (g:" + std::string(to_string(kind)) + " {name: " + lit + "}) "
                        "RETURN g.name AS name, g.code AS code, g");
                default:
                    break;
            }
        }
    }
    return TranslationResult::failure("no identifier in the query matches the graph index");
}

HttpTranslator::HttpTranslator(std::string base_url, std::filesystem::path prompts_dir)
    : base_url_(std::move(base_url)) {
    system_prompt_ = read_asset(prompts_dir / "translator_repobench.txt");
    schema_text_ = read_asset(prompts_dir / "graph_schema.txt");
}

TranslationResult HttpTranslator::translate(const std::string& query, const CodeGraph&) {
    nlohmann::json body;
    body["system"] = system_prompt_;
    body["schema"] = schema_text_;
    body["query"] = query;
    try {
        nlohmann::json res = http_post_json(wire_config_for_url(base_url_), "/translate", body);
        std::string cypher = res.at("cypher").get<std::string>();
        if (cypher.empty()) return TranslationResult::failure("translator returned empty text");
        return TranslationResult::success(std::move(cypher));
    } catch (const nlohmann::json::exception& e) {
        return TranslationResult::failure(std::string("malformed translator response: ") + e.what());
    }
}

RetrievalResponse route(const CodeGraph& graph, const std::string& query_text,
                        QueryTranslator& translator, EmbedderClient& embedder,
                        RerankerClient& reranker, const SearchConfig& config) {
    using clock = std::chrono::steady_clock;
    RetrievalResponse response;

    auto t0 = clock::now();
    TranslationResult translation = translator.translate(query_text, graph);
    response.diagnostics.translate_ms =
        std::chrono::duration<double, std::milli>(clock::now() - t0).count();

    if (translation.ok) {
        response.diagnostics.translator_output = translation.cypher;
        auto t1 = clock::now();
        try {
            cypher::ResultTable table = cypher::run_entity_query(graph, translation.cypher);
            response.diagnostics.execute_ms =
                std::chrono::duration<double, std::milli>(clock::now() - t1).count();
            if (!table.empty()) {
                response.path = RetrievalResponse::Path::Entity;
                response.entity_rows = std::move(table);
                return response;
            }
            response.diagnostics.note = "entity query returned no rows";
        } catch (const cypher::SyntaxError& e) {
            response.diagnostics.note = std::string("translated query failed to parse: ") + e.what();
        } catch (const cypher::UnsupportedConstruct& e) {
            response.diagnostics.note = std::string("translated query unsupported: ") + e.what();
        }
    } else {
        response.diagnostics.translator_output = translation.diagnostic;
        response.diagnostics.note = "translation failed";
    }

    auto t2 = clock::now();
    response.path = RetrievalResponse::Path::Mcts;
    response.ranked = search(graph, query_text, embedder, reranker, config);
    response.diagnostics.search_ms =
        std::chrono::duration<double, std::milli>(clock::now() - t2).count();
    return response;
}

nlohmann::ordered_json RetrievalResponse::to_json(const CodeGraph& graph) const {
    nlohmann::ordered_json j;
    j["path"] = path == Path::Entity ? "entity" : "mcts";
    if (path == Path::Entity) {
        j["entity_rows"] = entity_rows.to_json(graph);
    } else {
        j["ranked_nodes"] = ranked.to_json(graph);
    }
    j["diagnostics"] = {
        {"translator", diagnostics.translator_output},
        {"note", diagnostics.note},
        {"timings_ms",
         {{"translate", diagnostics.translate_ms},
          {"execute", diagnostics.execute_ms},
          {"search", diagnostics.search_ms}}},
    };
    return j;
}

}  // namespace ranger

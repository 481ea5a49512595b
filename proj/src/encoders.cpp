#include "ranger/encoders.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

#include "ranger/text.hpp"

namespace ranger {

std::vector<float> EmbedderClient::embed_one(const std::string& text) {
    std::vector<std::string> one{text};
    auto vs = embed(one);
    if (vs.empty()) throw DimensionMismatch("embedder returned no vector");
    return std::move(vs.front());
}

std::string_view to_string(DescribeMode mode) {
    switch (mode) {
        case DescribeMode::SummarizeCode: return "summarize_code";
        case DescribeMode::ListMembers: return "list_members";
        case DescribeMode::SummarizeFromMembers: return "summarize_from_members";
    }
    return "summarize_code";
}

std::vector<std::vector<float>> LocalEmbedder::embed(std::span<const std::string> texts) {
    std::vector<std::vector<float>> out;
    out.reserve(texts.size());
    for (const std::string& text : texts) {
        std::vector<float> v(static_cast<std::size_t>(dim_), 0.0f);
        for (const std::string& token : tokenize_words(text)) {
            v[fnv1a64(token) % static_cast<std::uint64_t>(dim_)] += 1.0f;
        }
        double norm = 0.0;
        for (float x : v) norm += static_cast<double>(x) * x;
        if (norm == 0.0) {
            v[0] = 1.0f;  // canonical unit vector for token-free input
        } else {
            const float inv = static_cast<float>(1.0 / std::sqrt(norm));
            for (float& x : v) x *= inv;
        }
        out.push_back(std::move(v));
    }
    return out;
}

std::vector<double> LocalReranker::rerank(const std::string& query,
                                          std::span<const std::string> documents) {
    auto q = tokenize_words(query);
    std::set<std::string> qset(q.begin(), q.end());
    std::vector<double> scores;
    scores.reserve(documents.size());
    for (const std::string& doc : documents) {
        auto d = tokenize_words(doc);
        std::set<std::string> dset(d.begin(), d.end());
        if (qset.empty() && dset.empty()) {
            scores.push_back(1.0);
            continue;
        }
        std::size_t inter = 0;
        for (const std::string& t : dset) {
            if (qset.contains(t)) ++inter;
        }
        const std::size_t uni = qset.size() + dset.size() - inter;
        scores.push_back(uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni));
    }
    return scores;
}

namespace {

// First identifier after a def/class keyword, else the first identifier-ish
// token, else a placeholder.
std::string subject_name(const std::string& code) {
    auto tokens = tokenize_words(code);
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
        if (tokens[i] == "def" || tokens[i] == "class") return tokens[i + 1];
    }
    return tokens.empty() ? std::string("code") : tokens.front();
}

std::vector<std::string> unique_tokens(const std::string& text, std::size_t limit) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const std::string& t : tokenize_words(text)) {
        if (seen.insert(t).second) {
            out.push_back(t);
            if (out.size() >= limit) break;
        }
    }
    return out;
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
    std::string out;
    for (const std::string& p : parts) {
        if (!out.empty()) out += sep;
        out += p;
    }
    return out;
}

}  // namespace

std::string LocalDescriber::describe(const std::string& input, DescribeMode mode) {
    switch (mode) {
        case DescribeMode::SummarizeCode: {
            const std::string name = subject_name(input);
            auto tokens = unique_tokens(input, 48);
            return "Purpose: summary of " + name + ". Implementation built from tokens: " +
                   join(tokens, " ") + ".";
        }
        case DescribeMode::ListMembers: {
            // Lexical member scan: defs, classes, and simple assignments.
            std::vector<std::string> lines;
            std::set<std::string> seen;
            std::istringstream in(input);
            std::string line;
            while (std::getline(in, line)) {
                std::size_t i = line.find_first_not_of(" \t");
                if (i == std::string::npos) continue;
                auto word_at = [&](std::size_t pos) {
                    std::size_t e = pos;
                    while (e < line.size() &&
                           (std::isalnum(static_cast<unsigned char>(line[e])) || line[e] == '_')) {
                        ++e;
                    }
                    return line.substr(pos, e - pos);
                };
                std::string head = word_at(i);
                std::string name, what;
                if ((head == "def" || head == "class") && i + head.size() + 1 < line.size()) {
                    name = word_at(i + head.size() + 1);
                    what = head == "def" ? "callable defined in code" : "type defined in code";
                } else if (!head.empty() &&
                           !std::isdigit(static_cast<unsigned char>(head[0]))) {
                    std::size_t after = i + head.size();
                    while (after < line.size() && line[after] == ' ') ++after;
                    if (after < line.size() && line[after] == '=' &&
                        (after + 1 >= line.size() || line[after + 1] != '=')) {
                        name = head;
                        what = "value assigned in code";
                    }
                }
                if (!name.empty() && seen.insert(name).second) {
                    lines.push_back(name + " - " + what);
                }
            }
            if (lines.empty()) return "---None---";
            return join(lines, "\n");
        }
        case DescribeMode::SummarizeFromMembers: {
            if (input.find_first_not_of(" \t\r\n") == std::string::npos) {
                return "No description found";
            }
            auto tokens = unique_tokens(input, 64);
            return "Composite summary of members covering tokens: " + join(tokens, " ") + ".";
        }
    }
    return "";
}

EncoderSuite make_local_encoders(int dim) {
    return EncoderSuite{
        std::make_shared<LocalDescriber>(),
        std::make_shared<LocalEmbedder>(dim),
        std::make_shared<LocalReranker>(),
    };
}

}  // namespace ranger

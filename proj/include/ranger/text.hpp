#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ranger {

// FNV-1a, used for stable token hashing. Must not change across releases:
// serialized embeddings depend on it.
inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

// Lowercased word tokens: splits on non-alphanumeric boundaries and at
// lower->upper camelCase transitions, so "parseHTTPHeader" and
// "parse_http_header" tokenize alike.
inline std::vector<std::string> tokenize_words(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) {
            out.push_back(cur);
            cur.clear();
        }
    };
    char prev = '\0';
    for (char c : text) {
        if (c >= 'A' && c <= 'Z') {
            if (prev >= 'a' && prev <= 'z') flush();
            cur.push_back(static_cast<char>(c - 'A' + 'a'));
        } else if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
            cur.push_back(c);
        } else {
            flush();
        }
        prev = c;
    }
    flush();
    return out;
}

inline double dot_product(const std::vector<float>& a, const std::vector<float>& b) {
    double s = 0.0;
    const std::size_t n = a.size() < b.size() ? a.size() : b.size();
    for (std::size_t i = 0; i < n; ++i) s += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    return s;
}

// Cosine similarity of two unit-ish vectors; falls back to a full cosine if
// the inputs are not normalized.
inline double cosine_similarity(const std::vector<float>& a, const std::vector<float>& b) {
    double num = 0.0, na = 0.0, nb = 0.0;
    const std::size_t n = a.size() < b.size() ? a.size() : b.size();
    for (std::size_t i = 0; i < n; ++i) {
        num += static_cast<double>(a[i]) * static_cast<double>(b[i]);
        na += static_cast<double>(a[i]) * static_cast<double>(a[i]);
        nb += static_cast<double>(b[i]) * static_cast<double>(b[i]);
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    double denom = std::sqrt(na) * std::sqrt(nb);
    return num / denom;
}

// Strict UTF-8 well-formedness check (RFC 3629: no overlongs, no surrogates,
// max U+10FFFF).
inline bool is_valid_utf8(std::string_view s) {
    std::size_t i = 0;
    const std::size_t n = s.size();
    while (i < n) {
        unsigned char c = static_cast<unsigned char>(s[i]);
        if (c < 0x80) {
            ++i;
            continue;
        }
        int len;
        std::uint32_t cp;
        if ((c & 0xE0) == 0xC0) {
            len = 2;
            cp = c & 0x1F;
        } else if ((c & 0xF0) == 0xE0) {
            len = 3;
            cp = c & 0x0F;
        } else if ((c & 0xF8) == 0xF0) {
            len = 4;
            cp = c & 0x07;
        } else {
            return false;
        }
        if (i + len > n) return false;
        for (int k = 1; k < len; ++k) {
            unsigned char cc = static_cast<unsigned char>(s[i + k]);
            if ((cc & 0xC0) != 0x80) return false;
            cp = (cp << 6) | (cc & 0x3F);
        }
        if (len == 2 && cp < 0x80) return false;
        if (len == 3 && cp < 0x800) return false;
        if (len == 4 && cp < 0x10000) return false;
        if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return false;
        i += len;
    }
    return true;
}

// Shell-style glob against a path. A pattern containing '/' matches the whole
// relative path, otherwise it matches the basename. '*' does not cross '/',
// '**' does, '?' matches a single non-separator character.
bool glob_match(std::string_view pattern, std::string_view path);

}  // namespace ranger

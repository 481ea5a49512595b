#include "ranger/text.hpp"

namespace ranger {

namespace {

// Recursive matcher over pattern/path tails. Memoization is unnecessary at
// the pattern sizes we see (include/exclude CLI globs).
bool match_tail(std::string_view pat, std::string_view str) {
    while (true) {
        if (pat.empty()) return str.empty();
        if (pat.size() >= 2 && pat[0] == '*' && pat[1] == '*') {
            // '**' crosses separators; also swallow one adjacent '/'.
            std::string_view rest = pat.substr(2);
            if (!rest.empty() && rest[0] == '/') {
                if (match_tail(rest.substr(1), str)) return true;
            }
            for (std::size_t i = 0; i <= str.size(); ++i) {
                if (match_tail(rest, str.substr(i))) return true;
            }
            return false;
        }
        if (pat[0] == '*') {
            std::string_view rest = pat.substr(1);
            for (std::size_t i = 0; i <= str.size(); ++i) {
                if (i > 0 && str[i - 1] == '/') break;
                if (match_tail(rest, str.substr(i))) return true;
            }
            return false;
        }
        if (str.empty()) return false;
        if (pat[0] == '?') {
            if (str[0] == '/') return false;
        } else if (pat[0] == '[') {
            std::size_t close = pat.find(']', 1);
            if (close == std::string_view::npos) {
                if (pat[0] != str[0]) return false;
                pat.remove_prefix(1);
                str.remove_prefix(1);
                continue;
            }
            std::string_view set = pat.substr(1, close - 1);
            bool negate = !set.empty() && (set[0] == '!' || set[0] == '^');
            if (negate) set.remove_prefix(1);
            bool hit = false;
            for (std::size_t i = 0; i < set.size(); ++i) {
                if (i + 2 < set.size() && set[i + 1] == '-') {
                    if (str[0] >= set[i] && str[0] <= set[i + 2]) hit = true;
                    i += 2;
                } else if (set[i] == str[0]) {
                    hit = true;
                }
            }
            if (hit == negate) return false;
            pat.remove_prefix(close + 1);
            str.remove_prefix(1);
            continue;
        } else if (pat[0] != str[0]) {
            return false;
        }
        pat.remove_prefix(1);
        str.remove_prefix(1);
    }
}

}  // namespace

bool glob_match(std::string_view pattern, std::string_view path) {
    if (pattern.find('/') != std::string_view::npos) {
        return match_tail(pattern, path);
    }
    std::size_t slash = path.rfind('/');
    std::string_view base = slash == std::string_view::npos ? path : path.substr(slash + 1);
    return match_tail(pattern, base);
}

}  // namespace ranger

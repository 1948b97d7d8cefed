#pragma once

#include <algorithm>
#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace tprune {

struct TokenizerConfig {
    bool remove_stopwords = true;
};

/// Lucene's default English stop set.
inline constexpr std::array<std::string_view, 33> english_stopwords{
    "a",    "an",    "and",  "are",   "as",    "at",   "be",    "but",  "by",
    "for",  "if",    "in",   "into",  "is",    "it",   "no",    "not",  "of",
    "on",   "or",    "such", "that",  "the",   "their", "then", "there", "these",
    "they", "this",  "to",   "was",   "will",  "with"};

inline bool is_stopword(std::string_view term)
{
    return std::find(english_stopwords.begin(), english_stopwords.end(), term)
           != english_stopwords.end();
}

namespace detail {

// ASCII letters and digits, plus any byte of a multi-byte UTF-8 sequence so
// that non-ASCII words stay whole.
inline bool is_token_byte(unsigned char c)
{
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}

}  // namespace detail

/// Lowercases and splits on non-alphanumeric characters. Digit tokens are
/// kept: inclusive temporal queries match dates as ordinary words.
inline std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& cfg = {})
{
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) {
            if (!cfg.remove_stopwords || !is_stopword(cur)) {
                out.push_back(std::move(cur));
            }
            cur.clear();
        }
    };
    for (char ch : text) {
        auto c = static_cast<unsigned char>(ch);
        if (detail::is_token_byte(c)) {
            cur.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : ch);
        } else {
            flush();
        }
    }
    flush();
    return out;
}

inline std::string join_tokens(const std::vector<std::string>& tokens)
{
    std::string out;
    for (const auto& t : tokens) {
        if (!out.empty()) {
            out.push_back(' ');
        }
        out += t;
    }
    return out;
}

}  // namespace tprune

#include "postrec/analyzer.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace postrec {

namespace {

// Function words only; topic-bearing question words (how, why, add, ...)
// stay searchable.
constexpr std::array<std::string_view, 53> kStopwords = {
    "a",    "an",    "and",   "are",  "as",    "at",    "be",    "but",
    "by",   "can",   "did",   "do",   "does",  "for",   "from",  "had",
    "has",  "have",  "if",    "in",   "into",  "is",    "it",    "its",
    "me",   "my",    "no",    "not",  "of",    "on",    "or",    "our",
    "so",   "such",  "than",  "that", "the",   "their", "then",  "there",
    "these", "they", "this",  "to",   "was",   "we",    "what",  "when",
    "which", "will", "with",  "you",  "your",
};

bool is_stopword(std::string_view word) {
    return std::binary_search(kStopwords.begin(), kStopwords.end(), word);
}

} // namespace

std::span<const std::string_view> english_stopwords() {
    return {kStopwords.data(), kStopwords.size()};
}

std::vector<std::string> analyze_text(std::string_view text,
                                      const AnalyzerOptions& options) {
    std::vector<std::string> out;
    std::string token;
    auto flush = [&] {
        if (token.size() >= 2 && !is_stopword(token)) {
            if (options.stemming && token.size() >= 4 &&
                token.back() == 's' && token[token.size() - 2] != 's')
                token.pop_back();
            out.push_back(token);
        }
        token.clear();
    };
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            token += static_cast<char>(
                std::tolower(static_cast<unsigned char>(c)));
        } else {
            flush();
        }
    }
    flush();
    return out;
}

} // namespace postrec

#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace postrec {

struct AnalyzerOptions {
    // Light plural folding (strip a trailing 's' from longer words). Off so
    // text terms match the written words by default.
    bool stemming = false;
};

// The fixed English stopword list applied by analyze_text, sorted.
std::span<const std::string_view> english_stopwords();

// Lowercases, splits on non-alphanumeric bytes, drops one-character tokens
// and stopwords. Token order follows the input; duplicates are kept so term
// frequencies survive.
std::vector<std::string> analyze_text(std::string_view text,
                                      const AnalyzerOptions& options = {});

} // namespace postrec

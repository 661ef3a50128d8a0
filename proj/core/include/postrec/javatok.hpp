#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace postrec {

enum class TokKind : std::uint8_t {
    identifier,
    keyword,    // reserved words plus the literals true/false/null
    number,
    string_lit, // includes text blocks
    char_lit,
    punct,
};

struct Token {
    TokKind kind;
    std::string text;
    std::size_t offset; // byte offset of the first character in the source
};

bool is_java_keyword(std::string_view word);
bool is_primitive_type(std::string_view word);

// Lossy token scan of (possibly incomplete) Java source. Comments are
// dropped, annotations are dropped including their argument lists, string
// and char literals come back as single tokens with quotes kept. Multi-char
// operators are fused except >> and <<, which stay as single angle brackets
// so generic argument lists can be matched by bracket counting. Never throws;
// unterminated comments and literals run to end of input.
std::vector<Token> tokenize_java(std::string_view source);

} // namespace postrec

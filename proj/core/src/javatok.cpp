#include "postrec/javatok.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace postrec {

namespace {

constexpr std::array<std::string_view, 53> kKeywords = {
    "abstract", "assert", "boolean", "break", "byte", "case", "catch",
    "char", "class", "const", "continue", "default", "do", "double",
    "else", "enum", "extends", "false", "final", "finally", "float",
    "for", "goto", "if", "implements", "import", "instanceof", "int",
    "interface", "long", "native", "new", "null", "package", "private",
    "protected", "public", "return", "short", "static", "strictfp",
    "super", "switch", "synchronized", "this", "throw", "throws",
    "transient", "true", "try", "void", "volatile", "while",
};

bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

bool ident_part(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

bool digit(char c) {
    return std::isdigit(static_cast<unsigned char>(c));
}

// Two-char operators that must not be split, so that a lone '=' or '<'
// token really means assignment or an angle bracket.
constexpr std::array<std::string_view, 18> kTwoCharOps = {
    "==", "!=", "<=", ">=", "&&", "||", "++", "--",
    "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=",
    "->", "::",
};

} // namespace

bool is_java_keyword(std::string_view word) {
    return std::binary_search(kKeywords.begin(), kKeywords.end(), word);
}

bool is_primitive_type(std::string_view word) {
    return word == "boolean" || word == "byte" || word == "char" ||
           word == "double" || word == "float" || word == "int" ||
           word == "long" || word == "short";
}

std::vector<Token> tokenize_java(std::string_view src) {
    std::vector<Token> out;
    std::size_t i = 0;
    const std::size_t n = src.size();

    auto push = [&](TokKind kind, std::size_t start, std::size_t end) {
        out.push_back({kind, std::string(src.substr(start, end - start)), start});
    };

    while (i < n) {
        char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        // comments
        if (c == '/' && i + 1 < n && src[i + 1] == '/') {
            while (i < n && src[i] != '\n')
                ++i;
            continue;
        }
        if (c == '/' && i + 1 < n && src[i + 1] == '*') {
            i += 2;
            while (i + 1 < n && !(src[i] == '*' && src[i + 1] == '/'))
                ++i;
            i = (i + 1 < n) ? i + 2 : n;
            continue;
        }
        // string literals and text blocks
        if (c == '"') {
            std::size_t start = i;
            if (i + 2 < n && src[i + 1] == '"' && src[i + 2] == '"') {
                i += 3;
                while (i + 2 < n &&
                       !(src[i] == '"' && src[i + 1] == '"' && src[i + 2] == '"')) {
                    if (src[i] == '\\')
                        ++i;
                    ++i;
                }
                i = (i + 2 < n) ? i + 3 : n;
            } else {
                ++i;
                while (i < n && src[i] != '"' && src[i] != '\n') {
                    if (src[i] == '\\')
                        ++i;
                    ++i;
                }
                if (i < n && src[i] == '"')
                    ++i;
            }
            push(TokKind::string_lit, start, i);
            continue;
        }
        if (c == '\'') {
            std::size_t start = i;
            ++i;
            while (i < n && src[i] != '\'' && src[i] != '\n') {
                if (src[i] == '\\')
                    ++i;
                ++i;
            }
            if (i < n && src[i] == '\'')
                ++i;
            push(TokKind::char_lit, start, i);
            continue;
        }
        // annotations vanish: @Name, dotted names, optional (...) arguments.
        // @interface keeps its keyword so type declarations still scan.
        if (c == '@') {
            std::size_t j = i + 1;
            while (j < n && std::isspace(static_cast<unsigned char>(src[j])))
                ++j;
            if (j + 8 <= n && src.substr(j, 9) == "interface" &&
                (j + 9 == n || !ident_part(src[j + 9]))) {
                i = j;
                continue;
            }
            if (j < n && ident_start(src[j])) {
                while (j < n && (ident_part(src[j]) || src[j] == '.'))
                    ++j;
                std::size_t k = j;
                while (k < n && std::isspace(static_cast<unsigned char>(src[k])))
                    ++k;
                if (k < n && src[k] == '(') {
                    int depth = 0;
                    while (k < n) {
                        if (src[k] == '(')
                            ++depth;
                        else if (src[k] == ')' && --depth == 0) {
                            ++k;
                            break;
                        }
                        ++k;
                    }
                    j = k;
                }
                i = j;
                continue;
            }
            ++i; // stray @, drop it
            continue;
        }
        if (ident_start(c)) {
            std::size_t start = i;
            while (i < n && ident_part(src[i]))
                ++i;
            std::string_view word = src.substr(start, i - start);
            push(is_java_keyword(word) ? TokKind::keyword : TokKind::identifier,
                 start, i);
            continue;
        }
        if (digit(c)) {
            std::size_t start = i;
            while (i < n) {
                char d = src[i];
                if (std::isalnum(static_cast<unsigned char>(d)) || d == '_') {
                    ++i;
                } else if (d == '.' && i + 1 < n && digit(src[i + 1])) {
                    ++i;
                } else if ((d == '+' || d == '-') && i > start &&
                           (src[i - 1] == 'e' || src[i - 1] == 'E' ||
                            src[i - 1] == 'p' || src[i - 1] == 'P')) {
                    ++i;
                } else {
                    break;
                }
            }
            push(TokKind::number, start, i);
            continue;
        }
        // punctuation; fuse the two-char operators listed above
        if (i + 1 < n) {
            std::string_view two = src.substr(i, 2);
            if (std::find(kTwoCharOps.begin(), kTwoCharOps.end(), two) !=
                kTwoCharOps.end()) {
                push(TokKind::punct, i, i + 2);
                i += 2;
                continue;
            }
        }
        push(TokKind::punct, i, i + 1);
        ++i;
    }
    return out;
}

} // namespace postrec

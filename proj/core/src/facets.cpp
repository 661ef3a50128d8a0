#include "postrec/facets.hpp"

#include "postrec/javatok.hpp"

#include <optional>
#include <vector>

namespace postrec {

namespace {

using Toks = std::vector<Token>;

bool is_punct(const Token& t, std::string_view s) {
    return t.kind == TokKind::punct && t.text == s;
}

bool is_kw(const Token& t, std::string_view s) {
    return t.kind == TokKind::keyword && t.text == s;
}

bool is_ident(const Token& t) {
    return t.kind == TokKind::identifier;
}

bool is_modifier(const Token& t) {
    if (t.kind != TokKind::keyword)
        return false;
    return t.text == "public" || t.text == "protected" || t.text == "private" ||
           t.text == "static" || t.text == "final" || t.text == "abstract" ||
           t.text == "native" || t.text == "synchronized" ||
           t.text == "transient" || t.text == "volatile" ||
           t.text == "strictfp" || t.text == "default";
}

// t[i] is '{'; returns the index past the matching '}' if it exists.
std::optional<std::size_t> skip_braces(const Toks& t, std::size_t i) {
    int depth = 0;
    for (std::size_t n = t.size(); i < n; ++i) {
        if (is_punct(t[i], "{"))
            ++depth;
        else if (is_punct(t[i], "}") && --depth == 0)
            return i + 1;
    }
    return std::nullopt;
}

// t[i] is '('; returns the index past the matching ')' if it exists.
std::optional<std::size_t> skip_parens(const Toks& t, std::size_t i) {
    int depth = 0;
    for (std::size_t n = t.size(); i < n; ++i) {
        if (is_punct(t[i], "("))
            ++depth;
        else if (is_punct(t[i], ")") && --depth == 0)
            return i + 1;
    }
    return std::nullopt;
}

// t[i] is '<'; returns the index past the matching '>' when the span looks
// like a generic argument list. Hitting a statement-level token first means
// the '<' was a comparison, not a bracket.
std::optional<std::size_t> skip_generics(const Toks& t, std::size_t i) {
    int depth = 0;
    for (std::size_t n = t.size(); i < n; ++i) {
        const Token& tk = t[i];
        if (is_punct(tk, "<")) {
            ++depth;
        } else if (is_punct(tk, ">")) {
            if (--depth == 0)
                return i + 1;
        } else if (tk.kind == TokKind::punct &&
                   (tk.text == ";" || tk.text == "{" || tk.text == "}" ||
                    tk.text == "(" || tk.text == ")" || tk.text == "=")) {
            return std::nullopt;
        }
    }
    return std::nullopt;
}

bool check_compilation_unit(const Toks& t) {
    std::size_t i = 0;
    const std::size_t n = t.size();
    if (n == 0)
        return false;
    if (is_kw(t[i], "package")) {
        ++i;
        if (i >= n || !is_ident(t[i]))
            return false;
        ++i;
        while (i < n && is_punct(t[i], ".")) {
            ++i;
            if (i >= n || !is_ident(t[i]))
                return false;
            ++i;
        }
        if (i >= n || !is_punct(t[i], ";"))
            return false;
        ++i;
    }
    while (i < n && is_kw(t[i], "import")) {
        ++i;
        if (i < n && is_kw(t[i], "static"))
            ++i;
        if (i >= n || !is_ident(t[i]))
            return false;
        ++i;
        while (i < n && is_punct(t[i], ".")) {
            ++i;
            if (i < n && is_ident(t[i])) {
                ++i;
                continue;
            }
            if (i < n && is_punct(t[i], "*")) {
                ++i;
                break;
            }
            return false;
        }
        if (i >= n || !is_punct(t[i], ";"))
            return false;
        ++i;
    }
    bool any_type = false;
    while (i < n) {
        if (is_punct(t[i], ";")) {
            ++i;
            continue;
        }
        while (i < n && is_modifier(t[i]))
            ++i;
        if (i >= n)
            return false;
        if (!(is_kw(t[i], "class") || is_kw(t[i], "interface") ||
              is_kw(t[i], "enum")))
            return false;
        ++i;
        if (i >= n || !is_ident(t[i]))
            return false;
        ++i;
        int paren = 0;
        while (i < n && !(paren == 0 && is_punct(t[i], "{"))) {
            if (is_punct(t[i], ";") || is_punct(t[i], "}"))
                return false;
            if (is_punct(t[i], "("))
                ++paren;
            else if (is_punct(t[i], ")") && --paren < 0)
                return false;
            ++i;
        }
        if (i >= n)
            return false;
        auto past = skip_braces(t, i);
        if (!past)
            return false;
        i = *past;
        any_type = true;
    }
    return any_type;
}

bool check_class_body(const Toks& t) {
    std::size_t i = 0;
    const std::size_t n = t.size();
    if (n == 0)
        return false;
    while (i < n) {
        if (is_punct(t[i], ";")) {
            ++i;
            continue;
        }
        while (i < n && is_modifier(t[i]))
            ++i;
        if (i >= n)
            return false;
        if (is_punct(t[i], "{")) { // initializer block
            auto past = skip_braces(t, i);
            if (!past)
                return false;
            i = *past;
            continue;
        }
        if (is_kw(t[i], "class") || is_kw(t[i], "interface") ||
            is_kw(t[i], "enum")) {
            ++i;
            if (i >= n || !is_ident(t[i]))
                return false;
            ++i;
            while (i < n && !is_punct(t[i], "{")) {
                if (is_punct(t[i], ";") || is_punct(t[i], "}"))
                    return false;
                ++i;
            }
            if (i >= n)
                return false;
            auto past = skip_braces(t, i);
            if (!past)
                return false;
            i = *past;
            continue;
        }
        // member: `Type name ...`, or a bare constructor `Name(...) {...}`
        bool at_params = false;
        if (is_kw(t[i], "void") ||
            (t[i].kind == TokKind::keyword && is_primitive_type(t[i].text))) {
            ++i;
        } else if (is_ident(t[i])) {
            ++i;
            std::size_t segments = 1;
            while (i + 1 < n && is_punct(t[i], ".") && is_ident(t[i + 1])) {
                i += 2;
                ++segments;
            }
            if (segments == 1 && i < n && is_punct(t[i], "(")) {
                at_params = true;
            } else if (i < n && is_punct(t[i], "<")) {
                auto past = skip_generics(t, i);
                if (!past)
                    return false;
                i = *past;
            }
        } else {
            return false;
        }
        if (!at_params) {
            while (i + 1 < n && is_punct(t[i], "[") && is_punct(t[i + 1], "]"))
                i += 2;
            if (i >= n || !is_ident(t[i]))
                return false;
            ++i;
            while (i + 1 < n && is_punct(t[i], "[") && is_punct(t[i + 1], "]"))
                i += 2;
        }
        if (i >= n)
            return false;
        if (is_punct(t[i], "(")) {
            auto past = skip_parens(t, i);
            if (!past)
                return false;
            i = *past;
            if (i < n && is_kw(t[i], "throws")) {
                ++i;
                if (i >= n || !is_ident(t[i]))
                    return false;
                ++i;
                while (i < n && (is_punct(t[i], ".") || is_punct(t[i], ","))) {
                    ++i;
                    if (i >= n || !is_ident(t[i]))
                        return false;
                    ++i;
                }
            }
            if (i < n && is_punct(t[i], "{")) {
                auto body = skip_braces(t, i);
                if (!body)
                    return false;
                i = *body;
            } else if (i < n && is_punct(t[i], ";")) {
                ++i;
            } else {
                return false;
            }
            continue;
        }
        if (is_punct(t[i], "=") || is_punct(t[i], ";") || is_punct(t[i], ",")) {
            // field declarator(s): runs to ';' at zero bracket depth
            int paren = 0, brace = 0, bracket = 0;
            bool closed = false;
            while (i < n) {
                const Token& tk = t[i];
                if (tk.kind == TokKind::punct) {
                    if (tk.text == "(")
                        ++paren;
                    else if (tk.text == ")")
                        --paren;
                    else if (tk.text == "{")
                        ++brace;
                    else if (tk.text == "}")
                        --brace;
                    else if (tk.text == "[")
                        ++bracket;
                    else if (tk.text == "]")
                        --bracket;
                    else if (tk.text == ";" && paren == 0 && brace == 0 &&
                             bracket == 0) {
                        ++i;
                        closed = true;
                        break;
                    }
                    if (paren < 0 || brace < 0 || bracket < 0)
                        return false;
                }
                ++i;
            }
            if (!closed)
                return false;
            continue;
        }
        return false;
    }
    return true;
}

bool check_statements(const Toks& t) {
    if (t.empty())
        return false;
    int paren = 0, brace = 0, bracket = 0;
    for (const Token& tk : t) {
        if (tk.kind != TokKind::punct)
            continue;
        if (tk.text == "(")
            ++paren;
        else if (tk.text == ")" && --paren < 0)
            return false;
        else if (tk.text == "{")
            ++brace;
        else if (tk.text == "}" && --brace < 0)
            return false;
        else if (tk.text == "[")
            ++bracket;
        else if (tk.text == "]" && --bracket < 0)
            return false;
    }
    if (paren != 0 || brace != 0 || bracket != 0)
        return false;
    const Token& last = t.back();
    return is_punct(last, ";") || is_punct(last, "}");
}

constexpr std::string_view kClassPrefix = "class Fix { ";
constexpr std::string_view kClassSuffix = " }";
constexpr std::string_view kStmtPrefix = "class Fix { void wrap() { ";
constexpr std::string_view kStmtSuffix = " } }";
constexpr std::string_view kExprPrefix = "class Fix { void wrap() { Object v = (";
constexpr std::string_view kExprSuffix = "); } }";

std::size_t wrap_prefix_size(ParseMode m) {
    switch (m) {
    case ParseMode::class_body:
        return kClassPrefix.size();
    case ParseMode::statements:
        return kStmtPrefix.size();
    case ParseMode::expression:
        return kExprPrefix.size();
    case ParseMode::compilation_unit:
        break;
    }
    return 0;
}

// Extracts facets from the token stream, recording only terms whose first
// token lies inside [lo, hi): the byte range holding the caller's original
// source. Wrapper tokens sit outside the range and never become facets.
CodeFacets extract(const Toks& t, std::size_t lo, std::size_t hi) {
    CodeFacets out;
    const std::size_t n = t.size();
    std::vector<char> consumed(n, 0);
    auto in_range = [&](std::size_t idx) {
        return t[idx].offset >= lo && t[idx].offset < hi;
    };

    // import and package statements
    for (std::size_t i = 0; i < n; ++i) {
        if (is_kw(t[i], "package")) {
            consumed[i] = 1;
            std::size_t j = i + 1;
            while (j < n && !is_punct(t[j], ";")) {
                consumed[j] = 1;
                ++j;
            }
            if (j < n)
                consumed[j] = 1;
            i = j;
            continue;
        }
        if (!is_kw(t[i], "import"))
            continue;
        std::size_t j = i + 1;
        if (j < n && is_kw(t[j], "static"))
            ++j;
        if (j >= n || !is_ident(t[j]))
            continue;
        std::string name = t[j].text;
        ++j;
        bool ok = true;
        while (j < n && is_punct(t[j], ".")) {
            ++j;
            if (j < n && is_ident(t[j])) {
                name += '.';
                name += t[j].text;
                ++j;
            } else if (j < n && is_punct(t[j], "*")) {
                name += ".*";
                ++j;
                break;
            } else {
                ok = false;
                break;
            }
        }
        // a trailing ';' may be missing when the snippet is truncated
        if (!ok || (j < n && !is_punct(t[j], ";")))
            continue;
        std::size_t stop = j < n ? j : n - 1;
        for (std::size_t k = i; k <= stop; ++k)
            consumed[k] = 1;
        if (in_range(i))
            out.imports.insert(name);
        i = stop;
    }

    // variable declarations: Type [dims] [generics] [dims] name [dims]
    // followed by '=', ';' or ':' (the latter covers for-each headers)
    std::set<std::string> declared;
    for (std::size_t i = 0; i < n; ++i) {
        if (consumed[i])
            continue;
        bool prim =
            t[i].kind == TokKind::keyword && is_primitive_type(t[i].text);
        if (!is_ident(t[i]) && !prim)
            continue;
        if (i > 0 && (is_punct(t[i - 1], ".") || is_kw(t[i - 1], "new")))
            continue;
        std::size_t j = i;
        std::string type_text = t[j].text;
        ++j;
        if (!prim) {
            while (j + 1 < n && is_punct(t[j], ".") && is_ident(t[j + 1])) {
                type_text += '.';
                type_text += t[j + 1].text;
                j += 2;
            }
        }
        while (j + 1 < n && is_punct(t[j], "[") && is_punct(t[j + 1], "]"))
            j += 2;
        if (j < n && is_punct(t[j], "<")) {
            auto past = skip_generics(t, j);
            if (!past)
                continue;
            j = *past;
        }
        while (j + 1 < n && is_punct(t[j], "[") && is_punct(t[j + 1], "]"))
            j += 2;
        if (j >= n || !is_ident(t[j]) || consumed[j])
            continue;
        std::size_t name_idx = j;
        ++j;
        while (j + 1 < n && is_punct(t[j], "[") && is_punct(t[j + 1], "]"))
            j += 2;
        if (j >= n)
            continue;
        if (!(is_punct(t[j], "=") || is_punct(t[j], ";") ||
              is_punct(t[j], ":")))
            continue;
        declared.insert(t[name_idx].text);
        if (in_range(i))
            out.variable_types.insert(type_text);
        if (in_range(name_idx))
            out.variable_declarations.insert(t[name_idx].text);
        i = name_idx;
    }

    // object creations: new Name[.Name...][<...>](
    for (std::size_t i = 0; i < n; ++i) {
        if (!is_kw(t[i], "new"))
            continue;
        std::size_t j = i + 1;
        if (j >= n || !is_ident(t[j]) || consumed[j])
            continue;
        std::size_t name_start = j;
        std::string name = t[j].text;
        ++j;
        while (j + 1 < n && is_punct(t[j], ".") && is_ident(t[j + 1])) {
            name += '.';
            name += t[j + 1].text;
            j += 2;
        }
        if (j < n && is_punct(t[j], "<")) {
            auto past = skip_generics(t, j);
            if (!past)
                continue;
            j = *past;
        }
        if (j < n && is_punct(t[j], "(") && in_range(name_start))
            out.class_instances.insert(name);
    }

    // call sites: name '(' ... ')' then '{' means a declaration when a
    // type-ish token precedes the name; a ';' there instead marks a bodyless
    // signature, which is neither declared nor invoked
    for (std::size_t i = 0; i < n; ++i) {
        if (consumed[i] || !is_ident(t[i]))
            continue;
        if (i + 1 >= n || !is_punct(t[i + 1], "("))
            continue;
        const Token* prev = i > 0 ? &t[i - 1] : nullptr;
        if (prev && is_kw(*prev, "new"))
            continue;
        bool prev_typeish =
            prev && (prev->kind == TokKind::identifier || is_kw(*prev, "void") ||
                     (prev->kind == TokKind::keyword &&
                      is_primitive_type(prev->text)) ||
                     is_modifier(*prev) || is_punct(*prev, ">") ||
                     is_punct(*prev, "]"));
        bool decl = false, prototype = false;
        if (auto close = skip_parens(t, i + 1)) {
            std::size_t k = *close;
            if (k < n && is_kw(t[k], "throws")) {
                ++k;
                while (k < n && (is_ident(t[k]) || is_punct(t[k], ".") ||
                                 is_punct(t[k], ",")))
                    ++k;
            }
            if (k < n && is_punct(t[k], "{") && prev_typeish)
                decl = true;
            else if (k < n && is_punct(t[k], ";") && prev_typeish)
                prototype = true;
        }
        if (decl) {
            if (in_range(i))
                out.method_declarations.insert(t[i].text);
        } else if (!prototype) {
            if (in_range(i))
                out.method_invocations.insert(t[i].text);
        }
    }

    // static-looking receivers: Capitalized name before '.', not declared
    // as a variable here, counts as a used type
    for (std::size_t i = 0; i < n; ++i) {
        if (consumed[i] || !is_ident(t[i]))
            continue;
        if (i + 1 >= n || !is_punct(t[i + 1], "."))
            continue;
        char c0 = t[i].text[0];
        if (c0 < 'A' || c0 > 'Z')
            continue;
        if (i > 0 && (is_punct(t[i - 1], ".") || is_kw(t[i - 1], "new")))
            continue;
        if (declared.count(t[i].text))
            continue;
        if (in_range(i))
            out.variable_types.insert(t[i].text);
    }

    return out;
}

} // namespace

std::string_view parse_mode_name(ParseMode m) {
    switch (m) {
    case ParseMode::compilation_unit:
        return "CompilationUnit";
    case ParseMode::class_body:
        return "ClassBodyDeclarations";
    case ParseMode::statements:
        return "Statements";
    case ParseMode::expression:
        return "Expression";
    }
    return "Expression";
}

std::string wrap_snippet(std::string_view source, ParseMode target) {
    std::string out;
    switch (target) {
    case ParseMode::compilation_unit:
        return std::string(source);
    case ParseMode::class_body:
        out.reserve(kClassPrefix.size() + source.size() + kClassSuffix.size());
        out.append(kClassPrefix).append(source).append(kClassSuffix);
        return out;
    case ParseMode::statements:
        out.reserve(kStmtPrefix.size() + source.size() + kStmtSuffix.size());
        out.append(kStmtPrefix).append(source).append(kStmtSuffix);
        return out;
    case ParseMode::expression:
        out.reserve(kExprPrefix.size() + source.size() + kExprSuffix.size());
        out.append(kExprPrefix).append(source).append(kExprSuffix);
        return out;
    }
    return std::string(source);
}

ParseOutput parse_facets(std::string_view source, bool allow_wrapping) {
    ParseOutput out;
    Toks direct = tokenize_java(source);
    if (check_compilation_unit(direct)) {
        out.outcome.source = std::string(source);
        out.outcome.mode_used = ParseMode::compilation_unit;
        out.outcome.wrapped = false;
        out.facets = extract(direct, 0, source.size());
        return out;
    }
    if (!allow_wrapping) {
        out.outcome.source = std::string(source);
        out.outcome.mode_used = ParseMode::compilation_unit;
        out.outcome.wrapped = false;
        return out;
    }
    ParseMode mode = ParseMode::expression;
    if (check_class_body(direct))
        mode = ParseMode::class_body;
    else if (check_statements(direct))
        mode = ParseMode::statements;
    out.outcome.source = wrap_snippet(source, mode);
    out.outcome.mode_used = mode;
    out.outcome.wrapped = true;
    const std::size_t lo = wrap_prefix_size(mode);
    Toks wrapped = tokenize_java(out.outcome.source);
    out.facets = extract(wrapped, lo, lo + source.size());
    return out;
}

} // namespace postrec

#pragma once

#include <set>
#include <string>
#include <string_view>

namespace postrec {

// The six code facets recoverable from a Java snippet. Terms are kept
// verbatim (case preserved); each set is deduplicated and ordered.
struct CodeFacets {
    std::set<std::string> imports;
    std::set<std::string> method_declarations;
    std::set<std::string> method_invocations;
    std::set<std::string> variable_types;
    std::set<std::string> variable_declarations;
    std::set<std::string> class_instances;

    bool empty() const {
        return imports.empty() && method_declarations.empty() &&
               method_invocations.empty() && variable_types.empty() &&
               variable_declarations.empty() && class_instances.empty();
    }
    bool operator==(const CodeFacets&) const = default;
};

// How much synthetic context a snippet needed before it scanned cleanly.
// Ordered strictest to laxest; parse_facets reports the strictest mode
// that accepts the source.
enum class ParseMode : std::uint8_t {
    compilation_unit = 0,
    class_body,
    statements,
    expression,
};

std::string_view parse_mode_name(ParseMode m);

struct WrapOutcome {
    std::string source;  // the source extraction ran on, wrapped if needed
    ParseMode mode_used = ParseMode::compilation_unit;
    bool wrapped = false; // true iff mode_used != compilation_unit
};

// Encloses the source verbatim in the synthetic wrapper for the target mode.
// compilation_unit returns the source unchanged.
std::string wrap_snippet(std::string_view source, ParseMode target);

struct ParseOutput {
    CodeFacets facets;
    WrapOutcome outcome;
};

// Walks the mode ladder (compilation unit, class body, statements,
// expression), wraps at the first accepting mode, and extracts facets.
// Wrapper tokens never produce facets. With allow_wrapping=false only
// complete compilation units yield facets; anything else comes back empty
// with wrapped=false. Empty or blank source yields empty facets.
ParseOutput parse_facets(std::string_view source, bool allow_wrapping = true);

} // namespace postrec

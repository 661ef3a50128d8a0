#pragma once

#include "postrec/facets.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace postrec {

struct CanonicalEntry {
    std::string name;         // fully qualified, e.g. java.util.List
    std::uint64_t frequency;  // how often the class shows up in the corpus
};

// Frequency-ranked table of fully qualified class names, used to restore
// missing import directives. Entries are ordered by frequency descending,
// name ascending, and truncated to the top_n most frequent.
class CanonicalTable {
public:
    CanonicalTable() = default;

    static constexpr std::size_t kDefaultTopN = 10000;

    // TSV, one `name<TAB>frequency` per line; blank lines and lines starting
    // with '#' are skipped. Malformed lines and negative frequencies raise
    // InputError naming the line number.
    static CanonicalTable load(const std::filesystem::path& file,
                               std::size_t top_n = kDefaultTopN);
    static CanonicalTable from_entries(std::vector<CanonicalEntry> entries,
                                       std::size_t top_n = kDefaultTopN);

    const std::vector<CanonicalEntry>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }

    // Fully qualified names whose final segment equals simple_name, in table
    // order (most frequent first).
    std::vector<std::string> candidates(std::string_view simple_name) const;

private:
    std::vector<CanonicalEntry> entries_;
};

std::size_t levenshtein(std::string_view a, std::string_view b);

// Resolves the simple class names used by the facets (variable_types plus
// class_instances, skipping already-qualified names) against the table.
// Ambiguous names pick the candidate closest by edit distance to any short
// window of the context text, ties broken by candidate name. Names without
// any candidate are dropped; unresolved, when given, receives their count.
// The result is sorted and deduplicated.
std::vector<std::string> deduce_imports(const CodeFacets& facets,
                                        const CanonicalTable& table,
                                        std::string_view context_text,
                                        std::size_t* unresolved = nullptr);

// Repairs an incomplete snippet for indexing: wraps it if it does not parse
// as a compilation unit, and, when it declares no imports, prepends the
// deduced import directives. Complete sources with imports come back
// unchanged; blank input yields an empty string.
std::string augment_snippet(std::string_view source,
                            const CanonicalTable& table,
                            std::string_view context_text);

} // namespace postrec

#pragma once

#include "postrec/facets.hpp"
#include "postrec/fields.hpp"

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace postrec {

// The pipeline knobs a search configuration toggles.
struct ConfigFlags {
    bool wrapping = false;      // repair incomplete snippets before parsing
    bool import_mining = false; // index-side import deduction
    bool entropy = false;       // quartile boosts on code clauses
    bool tokenizing = false;    // textual clauses from import segments
    ScorerMode scorer_mode = ScorerMode::tf_saturation;
    bool operator==(const ConfigFlags&) const = default;
};

struct QueryClause {
    FieldId field = FieldId::title;
    std::string term;
    double boost = 1.0;
    bool operator==(const QueryClause&) const = default;
};

// Disjunctive fielded query. Clauses are unique per (field, term) and kept
// in field order, then term order, so equal queries serialize identically.
struct Query {
    std::vector<QueryClause> clauses;
    bool empty() const { return clauses.empty(); }
    bool operator==(const Query&) const = default;
};

// Sorts and deduplicates clauses in place; duplicates keep the larger boost.
void canonicalize(Query& q);

// Per-term share of the total surprisal: -p ln p with p the term's share of
// the multiset. Terms of an even multiset score equally and the values sum
// to the Shannon entropy. Empty input gives an empty map.
std::map<std::string, double> entropy_scores(std::span<const std::string> terms);

// Keys of entropy scores ordered score descending, term ascending.
std::vector<std::string> rank_by_score(
    const std::map<std::string, double>& scores);

// Boost per rank position: rank r of n gets 4 - floor(4r/n), four for the
// top quarter down to one for the bottom quarter.
std::vector<int> quartile_boosts(std::size_t n);

struct ImportTokenizeOptions {
    // Leading registry prefixes that carry no topic signal.
    std::set<std::string> tld_segments = {"org", "com", "net",
                                          "io",  "edu", "gov"};
    // Structural package segments that appear in every other library.
    std::set<std::string> generic_segments = {"impl", "builder", "core",
                                              "api",  "util",    "internal",
                                              "common"};
    double title_boost = 4.0;
    double text_boost = 1.4;
};

// Breaks import names into topic words and spreads them over the three text
// fields: org.apache.camel.CamelContext contributes "apache" and "camel" to
// a title clause (boosted high) and to question and answer clauses.
std::vector<QueryClause> tokenize_imports(
    const std::set<std::string>& imports,
    const ImportTokenizeOptions& options = {});

// The term multiset entropy boosts draw from: every identifier occurrence in
// the source outside import/package directives, plus each import's dotted
// name once.
std::vector<std::string> context_terms(std::string_view source);

// Turns an in-progress source file into a search query per the flags. A
// source yielding no facets gives an empty query; the caller decides how to
// report that.
Query build_query(std::string_view context_source, const ConfigFlags& config,
                  const ImportTokenizeOptions& options = {});

// One clause per line, `FieldName: term^boost`. parse accepts snake_case
// and legacy field spellings and raises InputError naming the bad line.
std::string to_debug_text(const Query& q);
Query query_from_debug_text(std::string_view text);

std::string to_json_text(const Query& q);
Query query_from_json_text(std::string_view text);

} // namespace postrec

#include "postrec/canonical.hpp"

#include "postrec/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>

namespace postrec {

namespace {

std::string_view final_segment(std::string_view name) {
    auto pos = name.rfind('.');
    return pos == std::string_view::npos ? name : name.substr(pos + 1);
}

// Whitespace tokens of the context, capped so pathological posts stay cheap.
std::vector<std::string_view> context_tokens(std::string_view text) {
    constexpr std::size_t kMaxTokens = 2000;
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < text.size() && out.size() < kMaxTokens) {
        while (i < text.size() &&
               std::isspace(static_cast<unsigned char>(text[i])))
            ++i;
        std::size_t start = i;
        while (i < text.size() &&
               !std::isspace(static_cast<unsigned char>(text[i])))
            ++i;
        if (i > start)
            out.push_back(text.substr(start, i - start));
    }
    return out;
}

} // namespace

CanonicalTable CanonicalTable::load(const std::filesystem::path& file,
                                    std::size_t top_n) {
    std::ifstream in(file);
    if (!in)
        throw InputError("cannot open canonical table: " + file.string());
    std::vector<CanonicalEntry> entries;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line[0] == '#')
            continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size())
            throw InputError("canonical table " + file.string() + " line " +
                             std::to_string(lineno) +
                             ": expected name<TAB>frequency");
        std::string_view freq_text(line.data() + tab + 1,
                                   line.size() - tab - 1);
        if (freq_text.front() == '-')
            throw InputError("canonical table " + file.string() + " line " +
                             std::to_string(lineno) + ": negative frequency");
        std::uint64_t freq = 0;
        auto [ptr, ec] = std::from_chars(
            freq_text.data(), freq_text.data() + freq_text.size(), freq);
        if (ec != std::errc() || ptr != freq_text.data() + freq_text.size())
            throw InputError("canonical table " + file.string() + " line " +
                             std::to_string(lineno) + ": bad frequency '" +
                             std::string(freq_text) + "'");
        entries.push_back({line.substr(0, tab), freq});
    }
    return from_entries(std::move(entries), top_n);
}

CanonicalTable CanonicalTable::from_entries(std::vector<CanonicalEntry> entries,
                                            std::size_t top_n) {
    std::sort(entries.begin(), entries.end(),
              [](const CanonicalEntry& a, const CanonicalEntry& b) {
                  if (a.frequency != b.frequency)
                      return a.frequency > b.frequency;
                  return a.name < b.name;
              });
    if (entries.size() > top_n)
        entries.resize(top_n);
    CanonicalTable t;
    t.entries_ = std::move(entries);
    return t;
}

std::vector<std::string> CanonicalTable::candidates(
    std::string_view simple_name) const {
    std::vector<std::string> out;
    for (const auto& e : entries_) {
        if (final_segment(e.name) == simple_name)
            out.push_back(e.name);
    }
    return out;
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
    if (a.size() > b.size())
        std::swap(a, b);
    std::vector<std::size_t> row(a.size() + 1);
    std::iota(row.begin(), row.end(), std::size_t{0});
    for (std::size_t j = 1; j <= b.size(); ++j) {
        std::size_t prev_diag = row[0];
        row[0] = j;
        for (std::size_t i = 1; i <= a.size(); ++i) {
            std::size_t prev_row = row[i];
            std::size_t sub = prev_diag + (a[i - 1] != b[j - 1]);
            row[i] = std::min({row[i - 1] + 1, row[i] + 1, sub});
            prev_diag = prev_row;
        }
    }
    return row[a.size()];
}

std::vector<std::string> deduce_imports(const CodeFacets& facets,
                                        const CanonicalTable& table,
                                        std::string_view context_text,
                                        std::size_t* unresolved) {
    std::set<std::string> names(facets.variable_types.begin(),
                                facets.variable_types.end());
    names.insert(facets.class_instances.begin(), facets.class_instances.end());

    std::vector<std::string_view> tokens = context_tokens(context_text);
    std::set<std::string> resolved;
    std::size_t missed = 0;

    for (const std::string& simple : names) {
        if (simple.find('.') != std::string::npos)
            continue; // already qualified, nothing to deduce
        std::vector<std::string> cands = table.candidates(simple);
        if (cands.empty()) {
            ++missed;
            continue;
        }
        if (cands.size() == 1) {
            resolved.insert(cands.front());
            continue;
        }
        std::string best;
        std::size_t best_dist = std::numeric_limits<std::size_t>::max();
        for (const std::string& cand : cands) {
            std::size_t dist;
            if (tokens.empty()) {
                dist = levenshtein(cand, "");
            } else {
                dist = std::numeric_limits<std::size_t>::max();
                for (std::size_t i = 0; i < tokens.size(); ++i) {
                    std::string window(tokens[i]);
                    dist = std::min(dist, levenshtein(cand, window));
                    for (std::size_t len = 2;
                         len <= 3 && i + len <= tokens.size(); ++len) {
                        window += ' ';
                        window += tokens[i + len - 1];
                        dist = std::min(dist, levenshtein(cand, window));
                    }
                }
            }
            if (dist < best_dist || (dist == best_dist && cand < best)) {
                best = cand;
                best_dist = dist;
            }
        }
        resolved.insert(best);
    }
    if (unresolved)
        *unresolved = missed;
    return {resolved.begin(), resolved.end()};
}

std::string augment_snippet(std::string_view source,
                            const CanonicalTable& table,
                            std::string_view context_text) {
    bool blank = std::all_of(source.begin(), source.end(), [](char c) {
        return std::isspace(static_cast<unsigned char>(c));
    });
    if (blank)
        return "";
    ParseOutput parsed = parse_facets(source, true);
    std::string body =
        parsed.outcome.wrapped ? parsed.outcome.source : std::string(source);
    if (!parsed.facets.imports.empty())
        return body;
    std::vector<std::string> deduced =
        deduce_imports(parsed.facets, table, context_text);
    if (deduced.empty())
        return body;
    std::string out;
    for (const std::string& name : deduced) {
        out += "import ";
        out += name;
        out += ";\n";
    }
    out += '\n';
    out += body;
    return out;
}

} // namespace postrec

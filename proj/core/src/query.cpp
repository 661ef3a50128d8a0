#include "postrec/query.hpp"

#include "postrec/errors.hpp"
#include "postrec/javatok.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace postrec {

using nlohmann::json;

namespace {

std::string format_boost(double boost) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", boost);
    return buf;
}

std::string_view trim_view(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

} // namespace

void canonicalize(Query& q) {
    std::sort(q.clauses.begin(), q.clauses.end(),
              [](const QueryClause& a, const QueryClause& b) {
                  if (a.field != b.field)
                      return a.field < b.field;
                  if (a.term != b.term)
                      return a.term < b.term;
                  return a.boost > b.boost;
              });
    q.clauses.erase(std::unique(q.clauses.begin(), q.clauses.end(),
                                [](const QueryClause& a, const QueryClause& b) {
                                    return a.field == b.field &&
                                           a.term == b.term;
                                }),
                    q.clauses.end());
}

std::map<std::string, double> entropy_scores(
    std::span<const std::string> terms) {
    std::map<std::string, double> out;
    if (terms.empty())
        return out;
    std::map<std::string, std::size_t> counts;
    for (const std::string& t : terms)
        ++counts[t];
    const double total = static_cast<double>(terms.size());
    for (const auto& [term, count] : counts) {
        double p = static_cast<double>(count) / total;
        out[term] = -p * std::log(p);
    }
    return out;
}

std::vector<std::string> rank_by_score(
    const std::map<std::string, double>& scores) {
    std::vector<std::string> terms;
    terms.reserve(scores.size());
    for (const auto& [term, score] : scores)
        terms.push_back(term);
    std::stable_sort(terms.begin(), terms.end(),
                     [&scores](const std::string& a, const std::string& b) {
                         double sa = scores.at(a), sb = scores.at(b);
                         if (sa != sb)
                             return sa > sb;
                         return a < b;
                     });
    return terms;
}

std::vector<int> quartile_boosts(std::size_t n) {
    std::vector<int> out(n);
    for (std::size_t r = 0; r < n; ++r)
        out[r] = 4 - static_cast<int>((4 * r) / n);
    return out;
}

std::vector<QueryClause> tokenize_imports(
    const std::set<std::string>& imports,
    const ImportTokenizeOptions& options) {
    std::set<std::string> words;
    for (const std::string& name : imports) {
        std::vector<std::string> segments;
        std::size_t start = 0;
        while (start <= name.size()) {
            std::size_t dot = name.find('.', start);
            if (dot == std::string::npos)
                dot = name.size();
            if (dot > start)
                segments.emplace_back(name, start, dot - start);
            start = dot + 1;
        }
        if (segments.empty())
            continue;
        // the final segment is the class itself, not a topic word
        char last0 = segments.back()[0];
        if (last0 >= 'A' && last0 <= 'Z')
            segments.pop_back();
        for (std::size_t i = 0; i < segments.size(); ++i) {
            std::string seg = segments[i];
            std::transform(seg.begin(), seg.end(), seg.begin(),
                           [](unsigned char c) {
                               return static_cast<char>(std::tolower(c));
                           });
            if (seg == "*")
                continue;
            if (i == 0 && options.tld_segments.count(seg))
                continue;
            if (options.generic_segments.count(seg))
                continue;
            words.insert(std::move(seg));
        }
    }
    std::vector<QueryClause> out;
    for (const std::string& w : words) {
        out.push_back({FieldId::title, w, options.title_boost});
        out.push_back({FieldId::question, w, options.text_boost});
        out.push_back({FieldId::answer, w, options.text_boost});
    }
    return out;
}

std::vector<std::string> context_terms(std::string_view source) {
    std::vector<Token> tokens = tokenize_java(source);
    std::vector<std::string> out;
    const std::size_t n = tokens.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Token& t = tokens[i];
        if (t.kind == TokKind::keyword && t.text == "package") {
            while (i < n && !(tokens[i].kind == TokKind::punct &&
                              tokens[i].text == ";"))
                ++i;
            continue;
        }
        if (t.kind == TokKind::keyword && t.text == "import") {
            std::size_t j = i + 1;
            if (j < n && tokens[j].kind == TokKind::keyword &&
                tokens[j].text == "static")
                ++j;
            std::string name;
            while (j < n) {
                const Token& tj = tokens[j];
                if (tj.kind == TokKind::identifier) {
                    name += tj.text;
                } else if (tj.kind == TokKind::punct && tj.text == ".") {
                    name += '.';
                } else if (tj.kind == TokKind::punct && tj.text == "*") {
                    name += '*';
                } else {
                    break;
                }
                ++j;
            }
            if (!name.empty())
                out.push_back(std::move(name));
            i = j;
            continue;
        }
        if (t.kind == TokKind::identifier)
            out.push_back(t.text);
    }
    return out;
}

Query build_query(std::string_view context_source, const ConfigFlags& config,
                  const ImportTokenizeOptions& options) {
    ParseOutput parsed = parse_facets(context_source, config.wrapping);
    Query q;
    auto add_set = [&q](FieldId field, const std::set<std::string>& terms) {
        for (const std::string& t : terms)
            q.clauses.push_back({field, t, 1.0});
    };
    add_set(FieldId::import_declaration, parsed.facets.imports);
    add_set(FieldId::method_declaration, parsed.facets.method_declarations);
    add_set(FieldId::method_invocation, parsed.facets.method_invocations);
    add_set(FieldId::variable_type, parsed.facets.variable_types);
    add_set(FieldId::variable_declaration,
            parsed.facets.variable_declarations);
    add_set(FieldId::class_instance, parsed.facets.class_instances);

    if (config.entropy && !q.clauses.empty()) {
        std::vector<std::string> terms = context_terms(context_source);
        std::map<std::string, double> scores = entropy_scores(terms);
        std::vector<std::string> ranked = rank_by_score(scores);
        std::vector<int> boosts = quartile_boosts(ranked.size());
        std::map<std::string, int> boost_of;
        for (std::size_t i = 0; i < ranked.size(); ++i)
            boost_of[ranked[i]] = boosts[i];
        for (QueryClause& c : q.clauses) {
            auto it = boost_of.find(c.term);
            c.boost = it != boost_of.end() ? it->second : 1.0;
        }
    }
    if (config.tokenizing) {
        std::vector<QueryClause> textual =
            tokenize_imports(parsed.facets.imports, options);
        q.clauses.insert(q.clauses.end(), textual.begin(), textual.end());
    }
    canonicalize(q);
    return q;
}

std::string to_debug_text(const Query& q) {
    std::string out;
    for (const QueryClause& c : q.clauses) {
        out += field_display_name(c.field);
        out += ": ";
        out += c.term;
        out += '^';
        out += format_boost(c.boost);
        out += '\n';
    }
    return out;
}

Query query_from_debug_text(std::string_view text) {
    Query q;
    std::size_t lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos)
            eol = text.size();
        std::string_view line = trim_view(text.substr(pos, eol - pos));
        pos = eol + 1;
        ++lineno;
        if (line.empty())
            continue;
        std::size_t colon = line.find(':');
        if (colon == std::string_view::npos)
            throw InputError("query line " + std::to_string(lineno) +
                             ": expected 'Field: term^boost'");
        auto field = parse_field_name(trim_view(line.substr(0, colon)));
        if (!field)
            throw InputError("query line " + std::to_string(lineno) +
                             ": unknown field '" +
                             std::string(trim_view(line.substr(0, colon))) +
                             "'");
        std::string_view rest = trim_view(line.substr(colon + 1));
        double boost = 1.0;
        std::size_t caret = rest.rfind('^');
        if (caret != std::string_view::npos) {
            std::string num(trim_view(rest.substr(caret + 1)));
            char* end = nullptr;
            boost = std::strtod(num.c_str(), &end);
            if (num.empty() || end != num.c_str() + num.size())
                throw InputError("query line " + std::to_string(lineno) +
                                 ": bad boost '" + num + "'");
            rest = trim_view(rest.substr(0, caret));
        }
        if (rest.empty())
            throw InputError("query line " + std::to_string(lineno) +
                             ": empty term");
        q.clauses.push_back({*field, std::string(rest), boost});
    }
    canonicalize(q);
    return q;
}

std::string to_json_text(const Query& q) {
    json clauses = json::array();
    for (const QueryClause& c : q.clauses) {
        clauses.push_back({{"field", field_name(c.field)},
                           {"term", c.term},
                           {"boost", c.boost}});
    }
    json j;
    j["clauses"] = std::move(clauses);
    return j.dump();
}

Query query_from_json_text(std::string_view text) {
    Query q;
    try {
        json j = json::parse(text);
        for (const json& c : j.at("clauses")) {
            auto field = parse_field_name(c.at("field").get<std::string>());
            if (!field)
                throw InputError("unknown query field '" +
                                 c.at("field").get<std::string>() + "'");
            q.clauses.push_back({*field, c.at("term").get<std::string>(),
                                 c.value("boost", 1.0)});
        }
    } catch (const json::exception& e) {
        throw InputError(std::string("bad query JSON: ") + e.what());
    }
    canonicalize(q);
    return q;
}

} // namespace postrec

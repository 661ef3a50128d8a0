#include "postrec/metrics.hpp"

#include "postrec/errors.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <utility>

namespace postrec {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= line.size()) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string::npos)
            comma = line.size();
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

std::int64_t parse_int_field(const std::string& text,
                             const std::string& where) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
        throw InputError(where + ": expected an integer, got '" + text + "'");
    return v;
}

} // namespace

std::vector<EvalLabel> load_labels(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in)
        throw InputError("cannot open labels: " + file.string());
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line))
        throw InputError("labels " + file.string() + ": empty file");
    ++lineno;
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    if (line != "query_id,post_id,rank,score")
        throw InputError("labels " + file.string() +
                         ": expected header query_id,post_id,rank,score");
    std::vector<EvalLabel> labels;
    std::set<std::pair<std::string, int>> seen_ranks;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        const std::string where =
            "labels " + file.string() + " line " + std::to_string(lineno);
        std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != 4)
            throw InputError(where + ": expected 4 columns");
        EvalLabel label;
        label.query_id = cells[0];
        if (label.query_id.empty())
            throw InputError(where + ": empty query_id");
        label.post_id = parse_int_field(cells[1], where);
        label.rank = static_cast<int>(parse_int_field(cells[2], where));
        label.score = static_cast<int>(parse_int_field(cells[3], where));
        if (label.rank < 1)
            throw ValidationError(where + ": rank must be positive");
        if (label.score < 0 || label.score > 4)
            throw ValidationError(where + ": score must be 0..4");
        if (!seen_ranks.emplace(label.query_id, label.rank).second)
            throw ValidationError(where + ": duplicate rank " +
                                  std::to_string(label.rank) + " for query '" +
                                  label.query_id + "'");
        labels.push_back(std::move(label));
    }
    return labels;
}

LabelSet::LabelSet(std::vector<EvalLabel> labels) {
    for (EvalLabel& label : labels) {
        auto key = std::make_pair(std::move(label.query_id), label.post_id);
        auto [it, inserted] = scores_.emplace(key, label.score);
        if (!inserted && it->second != label.score)
            throw ValidationError("conflicting labels for query '" +
                                  key.first + "' post " +
                                  std::to_string(key.second));
    }
}

std::optional<int> LabelSet::score_for(const std::string& query_id,
                                       std::int64_t post_id) const {
    auto it = scores_.find({query_id, post_id});
    if (it == scores_.end())
        return std::nullopt;
    return it->second;
}

double success_rate(const QuerySlotScores& slots) {
    if (slots.empty())
        throw ValidationError("success rate over zero queries");
    std::size_t hits = 0;
    for (const auto& [query, scores] : slots) {
        for (int s : scores) {
            if (s >= kRelevantScore) {
                ++hits;
                break;
            }
        }
    }
    return static_cast<double>(hits) / static_cast<double>(slots.size());
}

double precision_at_n(const QuerySlotScores& slots, int top_n) {
    if (slots.empty())
        throw ValidationError("precision over zero queries");
    if (top_n <= 0)
        throw ValidationError("precision needs a positive slot count");
    std::size_t hits = 0;
    for (const auto& [query, scores] : slots) {
        for (int s : scores) {
            if (s >= kRelevantScore)
                ++hits;
        }
    }
    return static_cast<double>(hits) /
           (static_cast<double>(top_n) * static_cast<double>(slots.size()));
}

std::array<std::uint64_t, 5> confidence_histogram(
    const QuerySlotScores& slots) {
    std::array<std::uint64_t, 5> hist{};
    for (const auto& [query, scores] : slots) {
        for (int s : scores) {
            if (s >= 0 && s <= 4)
                ++hist[static_cast<std::size_t>(s)];
        }
    }
    return hist;
}

} // namespace postrec

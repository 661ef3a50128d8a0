#pragma once

#include "postrec/analyzer.hpp"
#include "postrec/canonical.hpp"
#include "postrec/fields.hpp"
#include "postrec/posts.hpp"
#include "postrec/query.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace postrec {

inline constexpr int kIndexFormatVersion = 1;

struct ScoringParams {
    double k1 = 2.0;
    double b = 0.75;
    ScorerMode mode = ScorerMode::standard;
    bool operator==(const ScoringParams&) const = default;
};

struct Posting {
    std::int64_t doc_id = 0;
    std::uint32_t tf = 0;
    bool operator==(const Posting&) const = default;
};

struct DocSummary {
    std::int64_t id = 0;
    std::string title;
};

// Per-field term occurrence lists for one document, the unit the index is
// built from. Text fields hold analyzed tokens, code fields facet terms.
struct FieldedDocument {
    std::int64_t doc_id = 0;
    std::string title;
    std::array<std::vector<std::string>, kFieldCount> field_terms;
};

using PostingsMap = std::map<std::string, std::vector<Posting>, std::less<>>;

// Immutable fielded inverted index. Lengths and averages are derivable from
// the postings (the sum of a document's term frequencies in a field is its
// stored length), which is how open() restores them.
class Index {
public:
    std::size_t doc_count() const { return docs_.size(); }
    const std::vector<DocSummary>& documents() const { return docs_; }
    const DocSummary* document(std::int64_t doc_id) const;

    const ScoringParams& params() const { return params_; }

    std::span<const Posting> postings(FieldId f, std::string_view term) const;
    std::size_t doc_frequency(FieldId f, std::string_view term) const;
    const PostingsMap& field_postings(FieldId f) const {
        return postings_[static_cast<std::size_t>(f)];
    }
    std::uint32_t field_length(FieldId f, std::int64_t doc_id) const;
    double avg_field_length(FieldId f) const {
        return avg_len_[static_cast<std::size_t>(f)];
    }

private:
    friend Index build_index(std::vector<FieldedDocument> docs,
                             const ScoringParams& params);
    friend Index open_index(const std::filesystem::path& dir);

    std::optional<std::size_t> slot_of(std::int64_t doc_id) const;
    void recompute_stats();

    std::array<PostingsMap, kFieldCount> postings_;
    std::array<std::vector<std::uint32_t>, kFieldCount> lengths_; // per slot
    std::array<double, kFieldCount> avg_len_{};
    std::vector<DocSummary> docs_; // sorted by id
    ScoringParams params_;
};

// Options for turning stored posts into fielded documents.
struct BuildOptions {
    bool wrapping = true;
    bool import_mining = true;
    ScoringParams scoring;
    AnalyzerOptions analyzer;
    int jobs = 1;
};

// table may be null when import_mining is off.
FieldedDocument document_from_post(const CleanPost& post,
                                   const CanonicalTable* table,
                                   const BuildOptions& options);

// Duplicate doc ids raise ValidationError.
Index build_index(std::vector<FieldedDocument> docs,
                  const ScoringParams& params = {});
Index build_index(std::span<const CleanPost> posts, const CanonicalTable* table,
                  const BuildOptions& options = {});
Index build_index(PostReader& reader, const CanonicalTable* table,
                  const BuildOptions& options = {});

// Score of a single term against a single document's field. Zero when the
// term does not occur there. idf uses the total document count, so documents
// empty in a field still dilute it.
double bm25(const Index& index, FieldId field, std::string_view term,
            std::int64_t doc_id,
            const std::optional<ScoringParams>& override_params = {});

struct SearchHit {
    std::int64_t doc_id = 0;
    double score = 0.0;
    std::string title;
};

// Top documents by summed clause scores (each clause weighted by its boost).
// Ties order by doc id ascending. override_params swaps the scorer without
// rebuilding, used to run one index under several scoring configurations.
std::vector<SearchHit> search(const Index& index, const Query& query,
                              std::size_t top_n,
                              const std::optional<ScoringParams>& override_params = {});

struct ClauseContribution {
    QueryClause clause;
    double score = 0.0; // boost already applied
};

// Per-clause score breakdown for one document, clauses in query order.
std::vector<ClauseContribution> explain(
    const Index& index, const Query& query, std::int64_t doc_id,
    const std::optional<ScoringParams>& override_params = {});

// Writes manifest.json, docs.jsonl and postings.jsonl. Rewriting the same
// index produces byte-identical files.
void persist(const Index& index, const std::filesystem::path& dir);

// Rejects missing manifests and format versions this build does not read.
Index open_index(const std::filesystem::path& dir);

} // namespace postrec

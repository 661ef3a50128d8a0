#pragma once

#include "postrec/xml_rows.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace postrec {

enum class SnippetOrigin : std::uint8_t { question, accepted_answer };

std::string_view snippet_origin_name(SnippetOrigin o);

struct CodeSnippet {
    SnippetOrigin origin;
    std::string source;
    bool operator==(const CodeSnippet&) const = default;
};

// A question that survived filtering, with its text flattened and its code
// blocks pulled out. Only the question's and the accepted answer's code is
// kept; every answer's prose feeds answer_texts, accepted answer first.
struct CleanPost {
    std::int64_t question_id = 0;
    std::string title;
    std::string question_text;
    std::vector<std::string> answer_texts;
    std::vector<CodeSnippet> code_snippets;
    std::vector<std::string> tags;
    bool operator==(const CleanPost&) const = default;
};

struct RejectionTally {
    std::uint64_t no_accept = 0; // no accepted answer among the group
    std::uint64_t no_code = 0;   // no code block in question or accepted answer
    std::uint64_t no_java = 0;   // "java" missing from the tags
};

// Applies the keep rules to one grouped question. Rules check in order:
// accepted answer present, code present, java tag present; the first failure
// is the one tallied. Callers must pass only answers of this question.
std::optional<CleanPost> clean_and_filter(const RawRow& question,
                                          const std::vector<RawRow>& answers,
                                          RejectionTally* tally = nullptr);

// JSON-lines store, one post per line, written in a fixed key order so equal
// inputs produce byte-identical files.
class PostWriter {
public:
    explicit PostWriter(const std::filesystem::path& file);
    void write(const CleanPost& post);
    void close();
    std::uint64_t written() const { return written_; }

private:
    std::ofstream out_;
    std::filesystem::path path_;
    std::uint64_t written_ = 0;
};

class PostReader {
public:
    explicit PostReader(const std::filesystem::path& file);
    // Next post, or nullopt at end of file. Corrupt lines raise InputError
    // with the line number.
    std::optional<CleanPost> next();

private:
    std::ifstream in_;
    std::filesystem::path path_;
    std::uint64_t lineno_ = 0;
};

void store_posts(const std::vector<CleanPost>& posts,
                 const std::filesystem::path& file);
std::vector<CleanPost> load_posts(const std::filesystem::path& file);

struct IngestOptions {
    // Grouping strategy for matching answers to questions. The default keeps
    // the id-keyed group map in memory, proportional to the dump's kept
    // content. Spill mode stages rows into question-id-hashed shard files and
    // groups one shard at a time, bounding memory by the shard size instead.
    bool spill = false;
    std::filesystem::path spill_dir; // required when spill is on
    int shards = 0; // 0 picks a count from the dump size
    std::uintmax_t dump_bytes_hint = 0; // sizes the shard count for streams
};

struct IngestSummary {
    RowTally rows;
    std::uint64_t questions = 0;
    std::uint64_t kept = 0;
    RejectionTally rejected;
};

// Streams a dump, groups answers with their questions, filters, and writes
// the survivors. In-memory mode emits posts in dump order of their
// questions; spill mode emits them grouped by shard, question id ascending.
IngestSummary ingest_dump(std::istream& dump, PostWriter& out,
                          const IngestOptions& options = {});

} // namespace postrec

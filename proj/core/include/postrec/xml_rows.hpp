#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace postrec {

enum class PostType : std::uint8_t { question, answer };

struct RawRow {
    std::int64_t id = 0;
    PostType post_type = PostType::question;
    std::optional<std::int64_t> parent_id;          // answers
    std::optional<std::int64_t> accepted_answer_id; // questions
    std::string title;
    std::string body; // HTML markup, entities decoded
    std::vector<std::string> tags; // lowercased, questions only
    int score = 0;
};

struct RowTally {
    std::uint64_t rows = 0;            // <row> elements seen
    std::uint64_t yielded = 0;         // rows returned to the caller
    std::uint64_t other_post_type = 0; // PostTypeId outside {1,2}
    std::uint64_t missing_attribute = 0;
};

// Pull parser for StackExchange Posts.xml dumps. Reads forward through the
// stream in constant memory: only the current row's attributes are ever
// buffered. Structural problems (mismatched tags, bad entities, unterminated
// attributes) raise InputError with the absolute byte offset; rows lacking a
// required attribute are skipped and tallied instead.
class DumpRowReader {
public:
    explicit DumpRowReader(std::istream& in);

    // Next usable row, or nullopt at end of dump.
    std::optional<RawRow> next();

    const RowTally& tally() const { return tally_; }

    // High-water mark of bytes buffered for a single row; stays flat no
    // matter how long the dump is.
    std::size_t peak_row_bytes() const { return peak_row_bytes_; }

private:
    int get();
    int peek();
    void expect(char c, const char* what);
    void skip_whitespace();
    [[noreturn]] void fail(const std::string& message) const;
    bool scan_to_next_row();
    std::map<std::string, std::string> read_attributes();
    std::string read_attribute_value();

    std::istream& in_;
    std::uint64_t offset_ = 0;
    int root_depth_ = 0;
    bool done_ = false;
    RowTally tally_;
    std::size_t peak_row_bytes_ = 0;
};

} // namespace postrec

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace postrec {

// Decodes the five named HTML entities plus numeric character references
// (&#NN; and &#xHH;, emitted as UTF-8). Anything unrecognized stays as-is.
std::string decode_entities(std::string_view s);

struct BodySegments {
    std::string text; // tag-stripped prose, whitespace collapsed
    std::vector<std::string> code_blocks; // one per <code> element, in order
};

// Splits a post body into prose and code. Forgiving by design: stray or
// unclosed tags are treated as text, tags inside <code> are dropped, and
// entities are decoded after tag removal so literal markup in prose (e.g.
// an escaped <String>) is not mistaken for a tag.
BodySegments extract_segments(std::string_view html_body);

} // namespace postrec

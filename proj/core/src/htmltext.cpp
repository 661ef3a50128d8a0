#include "postrec/htmltext.hpp"

#include <cctype>
#include <cstdint>
#include <optional>

namespace postrec {

namespace {

void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp <= 0x7F) {
        out += static_cast<char>(cp);
    } else if (cp <= 0x7FF) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp <= 0xFFFF) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

// Parses one entity starting at s[i] == '&'. On success appends the decoded
// character and returns the index past the ';'. On failure returns i.
std::size_t try_entity(std::string_view s, std::size_t i, std::string& out) {
    std::size_t semi = s.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 12)
        return i;
    std::string_view body = s.substr(i + 1, semi - i - 1);
    if (body == "lt")
        out += '<';
    else if (body == "gt")
        out += '>';
    else if (body == "amp")
        out += '&';
    else if (body == "quot")
        out += '"';
    else if (body == "apos")
        out += '\'';
    else if (body.size() >= 2 && body[0] == '#') {
        bool hex = body[1] == 'x' || body[1] == 'X';
        std::size_t k = hex ? 2 : 1;
        if (k >= body.size())
            return i;
        std::uint32_t cp = 0;
        for (; k < body.size(); ++k) {
            char c = body[k];
            std::uint32_t digit;
            if (c >= '0' && c <= '9')
                digit = static_cast<std::uint32_t>(c - '0');
            else if (hex && c >= 'a' && c <= 'f')
                digit = static_cast<std::uint32_t>(c - 'a' + 10);
            else if (hex && c >= 'A' && c <= 'F')
                digit = static_cast<std::uint32_t>(c - 'A' + 10);
            else
                return i;
            cp = cp * (hex ? 16 : 10) + digit;
            if (cp > 0x10FFFF)
                return i;
        }
        if (cp == 0)
            return i;
        append_utf8(out, cp);
    } else {
        return i;
    }
    return semi + 1;
}

std::string collapse_whitespace(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out += ' ';
            pending_space = false;
        }
        out += c;
    }
    return out;
}

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b])))
        ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])))
        --e;
    return std::string(s.substr(b, e - b));
}

struct TagScan {
    std::size_t end;   // index past the closing '>'
    std::string name;  // lowercased element name, empty for <!...> and <?...>
    bool closing;
    bool self_closing;
};

// s[i] == '<'. Returns the parsed tag or nothing when this '<' cannot be
// markup and should be kept as literal text.
std::optional<TagScan> scan_tag(std::string_view s, std::size_t i) {
    std::size_t n = s.size();
    std::size_t j = i + 1;
    if (j >= n)
        return std::nullopt;
    TagScan tag{0, "", false, false};
    if (s[j] == '!') {
        if (s.substr(j, 3) == "!--") {
            std::size_t close = s.find("-->", j + 3);
            if (close == std::string_view::npos)
                return std::nullopt;
            tag.end = close + 3;
            return tag;
        }
        std::size_t close = s.find('>', j);
        if (close == std::string_view::npos)
            return std::nullopt;
        tag.end = close + 1;
        return tag;
    }
    if (s[j] == '?') {
        std::size_t close = s.find('>', j);
        if (close == std::string_view::npos)
            return std::nullopt;
        tag.end = close + 1;
        return tag;
    }
    if (s[j] == '/') {
        tag.closing = true;
        ++j;
    }
    if (j >= n || !std::isalpha(static_cast<unsigned char>(s[j])))
        return std::nullopt;
    while (j < n && (std::isalnum(static_cast<unsigned char>(s[j])))) {
        tag.name += static_cast<char>(
            std::tolower(static_cast<unsigned char>(s[j])));
        ++j;
    }
    // attributes: skip to '>' outside quotes
    char quote = 0;
    while (j < n) {
        char c = s[j];
        if (quote) {
            if (c == quote)
                quote = 0;
        } else if (c == '"' || c == '\'') {
            quote = c;
        } else if (c == '>') {
            tag.self_closing = j > i + 1 && s[j - 1] == '/';
            tag.end = j + 1;
            return tag;
        }
        ++j;
    }
    return std::nullopt;
}

} // namespace

std::string decode_entities(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] == '&') {
            std::size_t next = try_entity(s, i, out);
            if (next != i) {
                i = next;
                continue;
            }
        }
        out += s[i];
        ++i;
    }
    return out;
}

BodySegments extract_segments(std::string_view html) {
    BodySegments out;
    std::string text_raw;
    std::string code_raw;
    int code_depth = 0;
    text_raw.reserve(html.size());

    auto flush_code = [&] {
        out.code_blocks.push_back(trim(decode_entities(code_raw)));
        code_raw.clear();
    };

    std::size_t i = 0;
    const std::size_t n = html.size();
    while (i < n) {
        char c = html[i];
        if (c != '<') {
            (code_depth > 0 ? code_raw : text_raw) += c;
            ++i;
            continue;
        }
        auto tag = scan_tag(html, i);
        if (!tag) { // stray '<', keep it as text
            (code_depth > 0 ? code_raw : text_raw) += c;
            ++i;
            continue;
        }
        i = tag->end;
        if (tag->name == "code") {
            if (tag->self_closing) {
                if (code_depth == 0) {
                    flush_code();
                }
            } else if (tag->closing) {
                if (code_depth > 0 && --code_depth == 0)
                    flush_code();
            } else {
                ++code_depth;
            }
            continue;
        }
        // any other tag: separates words in prose, vanishes inside code
        if (code_depth == 0)
            text_raw += ' ';
    }
    if (code_depth > 0)
        flush_code(); // unclosed <code> at end of body
    out.text = collapse_whitespace(decode_entities(text_raw));
    return out;
}

} // namespace postrec

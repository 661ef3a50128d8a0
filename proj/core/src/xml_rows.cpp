#include "postrec/xml_rows.hpp"

#include "postrec/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace postrec {

namespace {

bool name_char(int c) {
    return std::isalnum(c) || c == '_' || c == ':' || c == '.' || c == '-';
}

std::optional<std::int64_t> parse_int(const std::string& s) {
    std::int64_t v = 0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || s.empty())
        return std::nullopt;
    return v;
}

// Tags arrive as "<java><camel>" after entity decoding; older exports use
// "|java|camel|". Both yield lowercase tag names.
std::vector<std::string> parse_tags(const std::string& value) {
    std::vector<std::string> tags;
    auto push = [&tags](std::string_view s) {
        if (s.empty())
            return;
        std::string t(s);
        std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) {
            return static_cast<char>(std::tolower(c));
        });
        tags.push_back(std::move(t));
    };
    if (value.find('<') != std::string::npos) {
        std::size_t i = 0;
        while ((i = value.find('<', i)) != std::string::npos) {
            std::size_t close = value.find('>', i + 1);
            if (close == std::string::npos)
                break;
            push(std::string_view(value).substr(i + 1, close - i - 1));
            i = close + 1;
        }
    } else {
        std::size_t start = 0;
        while (start <= value.size()) {
            std::size_t bar = value.find('|', start);
            if (bar == std::string::npos)
                bar = value.size();
            push(std::string_view(value).substr(start, bar - start));
            start = bar + 1;
        }
    }
    return tags;
}

} // namespace

DumpRowReader::DumpRowReader(std::istream& in) : in_(in) {}

int DumpRowReader::get() {
    int c = in_.get();
    if (c != std::char_traits<char>::eof())
        ++offset_;
    return c;
}

int DumpRowReader::peek() {
    return in_.peek();
}

void DumpRowReader::fail(const std::string& message) const {
    throw InputError("malformed dump at byte " + std::to_string(offset_) +
                     ": " + message);
}

void DumpRowReader::expect(char c, const char* what) {
    int got = get();
    if (got != c)
        fail(std::string("expected ") + what);
}

void DumpRowReader::skip_whitespace() {
    while (true) {
        int c = peek();
        if (c == std::char_traits<char>::eof() ||
            !std::isspace(static_cast<unsigned char>(c)))
            return;
        get();
    }
}

// Advances to the start of the next <row> element's attribute list. Returns
// false at a well-formed end of dump.
bool DumpRowReader::scan_to_next_row() {
    constexpr int kEof = std::char_traits<char>::eof();
    while (true) {
        int c = get();
        if (c == kEof) {
            if (root_depth_ != 0)
                fail("unexpected end of file inside an element");
            return false;
        }
        if (c != '<')
            continue;
        int la = peek();
        if (la == '?') {
            int prev = 0;
            while (true) {
                int d = get();
                if (d == kEof)
                    fail("unterminated processing instruction");
                if (prev == '?' && d == '>')
                    break;
                prev = d;
            }
            continue;
        }
        if (la == '!') {
            get();
            if (peek() == '-') {
                get();
                expect('-', "'-' in comment opener");
                int d1 = 0, d2 = 0;
                while (true) {
                    int d = get();
                    if (d == kEof)
                        fail("unterminated comment");
                    if (d1 == '-' && d2 == '-' && d == '>')
                        break;
                    d1 = d2;
                    d2 = d;
                }
            } else {
                while (true) {
                    int d = get();
                    if (d == kEof)
                        fail("unterminated declaration");
                    if (d == '>')
                        break;
                }
            }
            continue;
        }
        if (la == '/') {
            get();
            while (name_char(peek()))
                get();
            skip_whitespace();
            expect('>', "'>' after closing tag name");
            if (--root_depth_ < 0)
                fail("closing tag without a matching opener");
            continue;
        }
        if (!std::isalpha(la) && la != '_')
            fail("stray '<'");
        std::string name;
        while (name_char(peek()))
            name += static_cast<char>(get());
        if (name == "row" && root_depth_ >= 1) {
            ++tally_.rows;
            return true;
        }
        // some other element: skip its attributes, honoring quotes
        char quote = 0;
        bool self_closing = false;
        int prev = 0;
        while (true) {
            int d = get();
            if (d == kEof)
                fail("unterminated start tag <" + name);
            if (quote) {
                if (d == quote)
                    quote = 0;
            } else if (d == '"' || d == '\'') {
                quote = static_cast<char>(d);
            } else if (d == '>') {
                self_closing = prev == '/';
                break;
            }
            prev = d;
        }
        if (!self_closing)
            ++root_depth_;
    }
}

std::string DumpRowReader::read_attribute_value() {
    constexpr int kEof = std::char_traits<char>::eof();
    int quote = get();
    if (quote != '"' && quote != '\'')
        fail("expected quoted attribute value");
    std::string value;
    while (true) {
        int c = get();
        if (c == kEof)
            fail("unterminated attribute value");
        if (c == quote)
            return value;
        if (c == '<')
            fail("raw '<' in attribute value");
        if (c != '&') {
            value += static_cast<char>(c);
            continue;
        }
        std::string entity;
        while (true) {
            int d = get();
            if (d == kEof || entity.size() > 10)
                fail("unterminated entity reference");
            if (d == ';')
                break;
            entity += static_cast<char>(d);
        }
        if (entity == "lt")
            value += '<';
        else if (entity == "gt")
            value += '>';
        else if (entity == "amp")
            value += '&';
        else if (entity == "quot")
            value += '"';
        else if (entity == "apos")
            value += '\'';
        else if (entity.size() >= 2 && entity[0] == '#') {
            bool hex = entity[1] == 'x' || entity[1] == 'X';
            std::uint32_t cp = 0;
            std::size_t k = hex ? 2 : 1;
            if (k >= entity.size())
                fail("empty character reference");
            for (; k < entity.size(); ++k) {
                char ch = entity[k];
                std::uint32_t digit;
                if (ch >= '0' && ch <= '9')
                    digit = static_cast<std::uint32_t>(ch - '0');
                else if (hex && ch >= 'a' && ch <= 'f')
                    digit = static_cast<std::uint32_t>(ch - 'a' + 10);
                else if (hex && ch >= 'A' && ch <= 'F')
                    digit = static_cast<std::uint32_t>(ch - 'A' + 10);
                else
                    fail("bad character reference &" + entity + ";");
                cp = cp * (hex ? 16 : 10) + digit;
                if (cp > 0x10FFFF)
                    fail("character reference out of range");
            }
            if (cp == 0)
                fail("NUL character reference");
            if (cp <= 0x7F) {
                value += static_cast<char>(cp);
            } else if (cp <= 0x7FF) {
                value += static_cast<char>(0xC0 | (cp >> 6));
                value += static_cast<char>(0x80 | (cp & 0x3F));
            } else if (cp <= 0xFFFF) {
                value += static_cast<char>(0xE0 | (cp >> 12));
                value += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
                value += static_cast<char>(0x80 | (cp & 0x3F));
            } else {
                value += static_cast<char>(0xF0 | (cp >> 18));
                value += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
                value += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
                value += static_cast<char>(0x80 | (cp & 0x3F));
            }
        } else {
            fail("unknown entity &" + entity + ";");
        }
    }
}

std::map<std::string, std::string> DumpRowReader::read_attributes() {
    std::map<std::string, std::string> attrs;
    std::size_t row_bytes = 0;
    while (true) {
        skip_whitespace();
        int c = peek();
        if (c == '/') {
            get();
            expect('>', "'>' after '/'");
            break;
        }
        if (c == '>') {
            // a <row> spelled with a separate closing tag; no children allowed
            get();
            skip_whitespace();
            expect('<', "'</row>' closing tag");
            expect('/', "'</row>' closing tag");
            std::string name;
            while (name_char(peek()))
                name += static_cast<char>(get());
            if (name != "row")
                fail("unexpected child element inside <row>");
            skip_whitespace();
            expect('>', "'>' after closing tag name");
            break;
        }
        if (c == std::char_traits<char>::eof())
            fail("unterminated <row> element");
        std::string name;
        while (name_char(peek()))
            name += static_cast<char>(get());
        if (name.empty())
            fail("expected attribute name");
        skip_whitespace();
        expect('=', "'=' after attribute name");
        skip_whitespace();
        std::string value = read_attribute_value();
        row_bytes += name.size() + value.size();
        attrs.emplace(std::move(name), std::move(value));
    }
    peak_row_bytes_ = std::max(peak_row_bytes_, row_bytes);
    return attrs;
}

std::optional<RawRow> DumpRowReader::next() {
    if (done_)
        return std::nullopt;
    while (scan_to_next_row()) {
        std::map<std::string, std::string> attrs = read_attributes();

        auto get_attr = [&attrs](const char* key) -> const std::string* {
            auto it = attrs.find(key);
            return it == attrs.end() ? nullptr : &it->second;
        };

        const std::string* id_text = get_attr("Id");
        const std::string* type_text = get_attr("PostTypeId");
        const std::string* body = get_attr("Body");
        std::optional<std::int64_t> id =
            id_text ? parse_int(*id_text) : std::nullopt;
        std::optional<std::int64_t> type =
            type_text ? parse_int(*type_text) : std::nullopt;
        if (!id || !type || !body) {
            ++tally_.missing_attribute;
            continue;
        }
        if (*type != 1 && *type != 2) {
            ++tally_.other_post_type;
            continue;
        }

        RawRow row;
        row.id = *id;
        row.body = *body;
        if (const std::string* title = get_attr("Title"))
            row.title = *title;
        if (const std::string* score = get_attr("Score")) {
            if (auto v = parse_int(*score))
                row.score = static_cast<int>(*v);
        }
        if (*type == 1) {
            row.post_type = PostType::question;
            if (const std::string* acc = get_attr("AcceptedAnswerId"))
                row.accepted_answer_id = parse_int(*acc);
            if (const std::string* tags = get_attr("Tags"))
                row.tags = parse_tags(*tags);
        } else {
            row.post_type = PostType::answer;
            const std::string* parent = get_attr("ParentId");
            std::optional<std::int64_t> parent_id =
                parent ? parse_int(*parent) : std::nullopt;
            if (!parent_id) {
                ++tally_.missing_attribute;
                continue;
            }
            row.parent_id = parent_id;
        }
        ++tally_.yielded;
        return row;
    }
    done_ = true;
    return std::nullopt;
}

} // namespace postrec

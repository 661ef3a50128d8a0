#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "postrec/errors.hpp"
#include "postrec/posts.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace postrec;
namespace fs = std::filesystem;

namespace {

RawRow make_question(std::int64_t id, std::string body,
                     std::optional<std::int64_t> accepted = std::nullopt,
                     std::vector<std::string> tags = {"java"}) {
    RawRow row;
    row.id = id;
    row.post_type = PostType::question;
    row.title = "Question " + std::to_string(id);
    row.body = std::move(body);
    row.accepted_answer_id = accepted;
    row.tags = std::move(tags);
    return row;
}

RawRow make_answer(std::int64_t id, std::int64_t parent, std::string body) {
    RawRow row;
    row.id = id;
    row.post_type = PostType::answer;
    row.parent_id = parent;
    row.body = std::move(body);
    return row;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("postrec_posts_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int counter;
};

int TempDir::counter = 0;

CleanPost sample_post(std::int64_t id) {
    CleanPost p;
    p.question_id = id;
    p.title = "Title \"quoted\" & plain";
    p.question_text = "some question text";
    p.answer_texts = {"accepted answer", "another answer"};
    p.code_snippets = {{SnippetOrigin::question, "int x = 1;\nuse(x);"},
                       {SnippetOrigin::accepted_answer, "foo();"}};
    p.tags = {"java", "camel"};
    return p;
}

} // namespace

TEST_CASE("kept post carries flattened text and code") {
    auto q = make_question(
        1, "<p>How do I sort?</p><pre><code>list.sort(cmp);</code></pre>", 10);
    std::vector<RawRow> answers = {
        make_answer(11, 1, "<p>Other way.</p>"),
        make_answer(10, 1, "<p>Use sort.</p><pre><code>Collections.sort(l);"
                           "</code></pre>"),
    };
    auto post = clean_and_filter(q, answers);
    REQUIRE(post.has_value());
    CHECK(post->question_id == 1);
    CHECK(post->question_text == "How do I sort?");
    // accepted answer's prose comes first, then the others in input order
    REQUIRE(post->answer_texts.size() == 2);
    CHECK(post->answer_texts[0] == "Use sort.");
    CHECK(post->answer_texts[1] == "Other way.");
    // code from question then accepted answer only
    REQUIRE(post->code_snippets.size() == 2);
    CHECK(post->code_snippets[0] ==
          CodeSnippet{SnippetOrigin::question, "list.sort(cmp);"});
    CHECK(post->code_snippets[1] ==
          CodeSnippet{SnippetOrigin::accepted_answer, "Collections.sort(l);"});
    CHECK(post->tags == std::vector<std::string>{"java"});
}

TEST_CASE("non-accepted answer code is not kept") {
    auto q = make_question(1, "<p>q</p><pre><code>q();</code></pre>", 10);
    std::vector<RawRow> answers = {
        make_answer(10, 1, "<p>yes</p>"),
        make_answer(11, 1, "<code>other();</code>"),
    };
    auto post = clean_and_filter(q, answers);
    REQUIRE(post.has_value());
    REQUIRE(post->code_snippets.size() == 1);
    CHECK(post->code_snippets[0].origin == SnippetOrigin::question);
}

TEST_CASE("filter rules check in order") {
    RejectionTally tally;

    // no accepted answer id
    auto q1 = make_question(1, "<code>x();</code>");
    CHECK_FALSE(clean_and_filter(q1, {make_answer(10, 1, "a")}, &tally));
    CHECK(tally.no_accept == 1);

    // accepted id points at a missing answer
    auto q2 = make_question(2, "<code>x();</code>", 99);
    CHECK_FALSE(clean_and_filter(q2, {make_answer(10, 2, "a")}, &tally));
    CHECK(tally.no_accept == 2);

    // accepted answer exists but no code anywhere
    auto q3 = make_question(3, "<p>prose only</p>", 10);
    CHECK_FALSE(clean_and_filter(q3, {make_answer(10, 3, "<p>also prose</p>")},
                                 &tally));
    CHECK(tally.no_code == 1);

    // code exists only in a non-accepted answer
    auto q4 = make_question(4, "<p>prose</p>", 10);
    CHECK_FALSE(clean_and_filter(
        q4,
        {make_answer(10, 4, "<p>ok</p>"), make_answer(11, 4, "<code>c()</code>")},
        &tally));
    CHECK(tally.no_code == 2);

    // java tag missing; earlier rules pass, so no_java is the reason
    auto q5 = make_question(5, "<code>x();</code>", 10, {"python"});
    CHECK_FALSE(clean_and_filter(q5, {make_answer(10, 5, "a")}, &tally));
    CHECK(tally.no_java == 1);

    // all rules pass
    auto q6 = make_question(6, "<code>x();</code>", 10, {"spring", "java"});
    CHECK(clean_and_filter(q6, {make_answer(10, 6, "a")}, &tally).has_value());
    CHECK(tally.no_accept == 2);
    CHECK(tally.no_code == 2);
    CHECK(tally.no_java == 1);
}

TEST_CASE("code rule checks element presence, not content") {
    auto q = make_question(1, "<p>text</p><code>   </code>", 10);
    RejectionTally tally;
    auto post = clean_and_filter(q, {make_answer(10, 1, "a")}, &tally);
    REQUIRE(post.has_value());
    CHECK(tally.no_code == 0);
    REQUIRE(post->code_snippets.size() == 1);
    CHECK(post->code_snippets[0].source.empty());
}

TEST_CASE("store round-trips exactly") {
    TempDir tmp;
    std::vector<CleanPost> posts = {sample_post(1), sample_post(2)};
    posts[1].answer_texts.clear();
    posts[1].tags.clear();
    posts[1].title = "unicode caf\xC3\xA9 \xE4\xB8\xAD";
    auto file = tmp.path / "posts.jsonl";
    store_posts(posts, file);
    CHECK(load_posts(file) == posts);
}

TEST_CASE("writer counts and equal input produces identical bytes") {
    TempDir tmp;
    auto write_to = [&](const fs::path& file) {
        PostWriter writer(file);
        writer.write(sample_post(3));
        writer.write(sample_post(4));
        writer.close();
        CHECK(writer.written() == 2);
    };
    write_to(tmp.path / "a.jsonl");
    write_to(tmp.path / "b.jsonl");
    std::ifstream a(tmp.path / "a.jsonl"), b(tmp.path / "b.jsonl");
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    CHECK(sa.str() == sb.str());
    CHECK_FALSE(sa.str().empty());
}

TEST_CASE("corrupt store lines name the line number") {
    TempDir tmp;
    auto file = tmp.path / "bad.jsonl";
    store_posts({sample_post(1)}, file);
    {
        std::ofstream app(file, std::ios::app);
        app << "{not json\n";
    }
    PostReader reader(file);
    CHECK(reader.next().has_value());
    try {
        reader.next();
        FAIL_CHECK("expected InputError");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("missing store file raises") {
    CHECK_THROWS_AS(load_posts("/nonexistent/path/posts.jsonl"), InputError);
}

TEST_CASE("ingest groups answers across the dump") {
    std::string dump =
        "<posts>"
        // answer arrives before its question
        "<row Id=\"20\" PostTypeId=\"2\" ParentId=\"2\" "
        "Body=\"&lt;code&gt;b();&lt;/code&gt;\" />"
        "<row Id=\"1\" PostTypeId=\"1\" AcceptedAnswerId=\"10\" Title=\"one\" "
        "Body=\"&lt;code&gt;a();&lt;/code&gt;\" Tags=\"&lt;java&gt;\" />"
        "<row Id=\"2\" PostTypeId=\"1\" AcceptedAnswerId=\"20\" Title=\"two\" "
        "Body=\"&lt;p&gt;prose&lt;/p&gt;\" Tags=\"&lt;java&gt;\" />"
        "<row Id=\"10\" PostTypeId=\"2\" ParentId=\"1\" Body=\"&lt;p&gt;done"
        "&lt;/p&gt;\" />"
        "</posts>";
    TempDir tmp;
    std::istringstream in(dump);
    PostWriter writer(tmp.path / "out.jsonl");
    IngestSummary summary = ingest_dump(in, writer);
    writer.close();
    CHECK(summary.rows.rows == 4);
    CHECK(summary.questions == 2);
    CHECK(summary.kept == 2);
    auto posts = load_posts(tmp.path / "out.jsonl");
    REQUIRE(posts.size() == 2);
    CHECK(posts[0].question_id == 1);
    CHECK(posts[1].question_id == 2);
    REQUIRE(posts[1].code_snippets.size() == 1);
    CHECK(posts[1].code_snippets[0].origin == SnippetOrigin::accepted_answer);
}

TEST_CASE("mini dump fixture ingests with exact tallies") {
    std::ifstream in(std::string(POSTREC_FIXTURE_DIR) + "/mini_dump.xml");
    REQUIRE(in.good());
    TempDir tmp;
    PostWriter writer(tmp.path / "store.jsonl");
    IngestSummary summary = ingest_dump(in, writer);
    writer.close();

    CHECK(summary.rows.rows == 23);
    CHECK(summary.rows.yielded == 21);
    CHECK(summary.rows.other_post_type == 1);
    CHECK(summary.rows.missing_attribute == 1);
    CHECK(summary.questions == 10);
    CHECK(summary.kept == 4);
    CHECK(summary.rejected.no_accept == 3);
    CHECK(summary.rejected.no_code == 2);
    CHECK(summary.rejected.no_java == 1);
    CHECK(writer.written() == 4);

    auto posts = load_posts(tmp.path / "store.jsonl");
    std::vector<std::int64_t> ids;
    for (const auto& p : posts)
        ids.push_back(p.question_id);
    CHECK(ids == std::vector<std::int64_t>{101, 102, 103, 104});
}

TEST_CASE("spill mode produces the same posts as in-memory mode") {
    auto read_fixture = [] {
        std::ifstream in(std::string(POSTREC_FIXTURE_DIR) + "/mini_dump.xml");
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    std::string dump = read_fixture();
    TempDir tmp;

    std::istringstream in_mem(dump);
    PostWriter w1(tmp.path / "mem.jsonl");
    IngestSummary s1 = ingest_dump(in_mem, w1);
    w1.close();

    IngestOptions opts;
    opts.spill = true;
    opts.spill_dir = tmp.path / "spill";
    opts.shards = 4;
    opts.dump_bytes_hint = dump.size();
    std::istringstream in_spill(dump);
    PostWriter w2(tmp.path / "spill.jsonl");
    IngestSummary s2 = ingest_dump(in_spill, w2, opts);
    w2.close();

    CHECK(s1.kept == s2.kept);
    CHECK(s1.questions == s2.questions);
    CHECK(s1.rejected.no_accept == s2.rejected.no_accept);
    CHECK(s1.rejected.no_code == s2.rejected.no_code);
    CHECK(s1.rejected.no_java == s2.rejected.no_java);

    auto mem = load_posts(tmp.path / "mem.jsonl");
    auto spill = load_posts(tmp.path / "spill.jsonl");
    auto by_id = [](const CleanPost& a, const CleanPost& b) {
        return a.question_id < b.question_id;
    };
    std::sort(mem.begin(), mem.end(), by_id);
    std::sort(spill.begin(), spill.end(), by_id);
    CHECK(mem == spill);
}

TEST_CASE("duplicate question ids keep the first occurrence") {
    std::string dump =
        "<posts>"
        "<row Id=\"1\" PostTypeId=\"1\" AcceptedAnswerId=\"10\" Title=\"first\" "
        "Body=\"&lt;code&gt;a();&lt;/code&gt;\" Tags=\"&lt;java&gt;\" />"
        "<row Id=\"1\" PostTypeId=\"1\" AcceptedAnswerId=\"10\" Title=\"second\" "
        "Body=\"&lt;code&gt;b();&lt;/code&gt;\" Tags=\"&lt;java&gt;\" />"
        "<row Id=\"10\" PostTypeId=\"2\" ParentId=\"1\" Body=\"ok\" />"
        "</posts>";
    TempDir tmp;
    std::istringstream in(dump);
    PostWriter writer(tmp.path / "out.jsonl");
    IngestSummary summary = ingest_dump(in, writer);
    writer.close();
    CHECK(summary.questions == 1);
    auto posts = load_posts(tmp.path / "out.jsonl");
    REQUIRE(posts.size() == 1);
    CHECK(posts[0].title == "first");
}

TEST_CASE("snippet origin names") {
    CHECK(snippet_origin_name(SnippetOrigin::question) == "question");
    CHECK(snippet_origin_name(SnippetOrigin::accepted_answer) ==
          "accepted_answer");
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "postrec/errors.hpp"
#include "postrec/index.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace postrec;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("postrec_index_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

FieldedDocument make_doc(std::int64_t id,
                         std::vector<std::string> title_terms,
                         std::vector<std::string> invocation_terms = {}) {
    FieldedDocument doc;
    doc.doc_id = id;
    doc.title = "doc " + std::to_string(id);
    doc.field_terms[static_cast<std::size_t>(FieldId::title)] =
        std::move(title_terms);
    doc.field_terms[static_cast<std::size_t>(FieldId::method_invocation)] =
        std::move(invocation_terms);
    return doc;
}

// reference scorer recomputing both modes from the index's public counters
double bm25_reference(const Index& index, FieldId field, const std::string& term,
                      std::int64_t doc_id, const ScoringParams& p) {
    double tf = 0;
    for (const Posting& post : index.postings(field, term))
        if (post.doc_id == doc_id)
            tf = post.tf;
    if (tf == 0)
        return 0.0;
    double len = index.field_length(field, doc_id);
    double avg = index.avg_field_length(field);
    double norm = avg > 0 ? (1.0 - p.b) + p.b * (len / avg) : 1.0;
    if (p.mode == ScorerMode::tf_saturation)
        return tf / (p.k1 * norm + tf);
    double n_docs = static_cast<double>(index.doc_count());
    double df = static_cast<double>(index.doc_frequency(field, term));
    double idf = std::log(1.0 + (n_docs - df + 0.5) / (df + 0.5));
    return idf * (tf * (p.k1 + 1.0)) / (tf + p.k1 * norm);
}

std::string slurp(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("postings carry frequencies and lengths") {
    auto index = build_index({
        make_doc(1, {"sort", "list", "sort"}),
        make_doc(2, {"sort", "map"}),
        make_doc(3, {}),
    });
    CHECK(index.doc_count() == 3);

    auto sort_postings = index.postings(FieldId::title, "sort");
    REQUIRE(sort_postings.size() == 2);
    CHECK(sort_postings[0].doc_id == 1);
    CHECK(sort_postings[0].tf == 2);
    CHECK(sort_postings[1].doc_id == 2);
    CHECK(sort_postings[1].tf == 1);

    CHECK(index.doc_frequency(FieldId::title, "sort") == 2);
    CHECK(index.doc_frequency(FieldId::title, "list") == 1);
    CHECK(index.doc_frequency(FieldId::title, "absent") == 0);
    CHECK(index.postings(FieldId::title, "absent").empty());

    CHECK(index.field_length(FieldId::title, 1) == 3);
    CHECK(index.field_length(FieldId::title, 2) == 2);
    CHECK(index.field_length(FieldId::title, 3) == 0);
    CHECK(index.avg_field_length(FieldId::title) ==
          doctest::Approx(5.0 / 3.0).epsilon(1e-12));
    CHECK(index.avg_field_length(FieldId::answer) == 0.0);

    REQUIRE(index.document(2) != nullptr);
    CHECK(index.document(2)->title == "doc 2");
    CHECK(index.document(99) == nullptr);
}

TEST_CASE("single term scores match hand-computed bm25") {
    ScoringParams params; // standard, k1=2, b=0.75
    auto index = build_index(
        {
            make_doc(1, {"sort", "list", "sort"}),
            make_doc(2, {"sort", "map"}),
            make_doc(3, {"other"}),
        },
        params);

    // doc 1: tf=2, len=3, avg=(3+2+1)/3=2, df=2, N=3
    double norm1 = 0.25 + 0.75 * (3.0 / 2.0);
    double idf = std::log(1.0 + (3.0 - 2.0 + 0.5) / 2.5);
    double expected1 = idf * (2.0 * 3.0) / (2.0 + 2.0 * norm1);
    CHECK(bm25(index, FieldId::title, "sort", 1) ==
          doctest::Approx(expected1).epsilon(1e-12));

    // absent term and absent doc both score zero
    CHECK(bm25(index, FieldId::title, "absent", 1) == 0.0);
    CHECK(bm25(index, FieldId::title, "sort", 3) == 0.0);
    CHECK(bm25(index, FieldId::answer, "sort", 1) == 0.0);

    // saturation mode ignores rarity but keeps length normalization
    ScoringParams sat;
    sat.mode = ScorerMode::tf_saturation;
    double expected_sat = 2.0 / (2.0 * norm1 + 2.0);
    CHECK(bm25(index, FieldId::title, "sort", 1, sat) ==
          doctest::Approx(expected_sat).epsilon(1e-12));
    CHECK(expected_sat < 1.0);
}

TEST_CASE("standard clause scores can exceed one on short fields") {
    auto index = build_index({
        make_doc(1, {"rare"}),
        make_doc(2, {"filler", "filler", "filler", "filler", "filler",
                     "filler", "filler", "filler", "filler", "filler"}),
        make_doc(3, {"filler", "other", "words", "here", "too"}),
    });
    CHECK(bm25(index, FieldId::title, "rare", 1) > 1.0);
}

TEST_CASE("search sums boosted clause scores and orders stably") {
    auto index = build_index({
        make_doc(1, {"camel", "routes"}, {"addRoutes"}),
        make_doc(2, {"camel"}, {}),
        make_doc(3, {"python"}, {"addRoutes"}),
    });
    Query q;
    q.clauses.push_back({FieldId::title, "camel", 2.0});
    q.clauses.push_back({FieldId::method_invocation, "addRoutes", 1.0});
    canonicalize(q);

    auto hits = search(index, q, 10);
    REQUIRE(hits.size() == 3);
    for (const auto& hit : hits) {
        double expected = 0;
        for (const auto& c : q.clauses)
            expected += c.boost * bm25(index, c.field, c.term, hit.doc_id);
        CHECK(hit.score == doctest::Approx(expected).epsilon(1e-12));
    }
    CHECK(std::is_sorted(hits.begin(), hits.end(),
                         [](const SearchHit& a, const SearchHit& b) {
                             return a.score > b.score;
                         }));
    CHECK(hits[0].title == index.document(hits[0].doc_id)->title);

    // top_n truncates
    CHECK(search(index, q, 2).size() == 2);
    CHECK(search(index, q, 0).empty());

    // zero-scoring documents never appear
    Query only_camel;
    only_camel.clauses.push_back({FieldId::title, "camel", 1.0});
    auto camel_hits = search(index, only_camel, 10);
    CHECK(camel_hits.size() == 2);
}

TEST_CASE("score ties order by doc id") {
    auto index = build_index({
        make_doc(7, {"same"}),
        make_doc(3, {"same"}),
        make_doc(5, {"same"}),
    });
    Query q;
    q.clauses.push_back({FieldId::title, "same", 1.0});
    auto hits = search(index, q, 10);
    REQUIRE(hits.size() == 3);
    CHECK(hits[0].doc_id == 3);
    CHECK(hits[1].doc_id == 5);
    CHECK(hits[2].doc_id == 7);
}

TEST_CASE("empty queries and empty indexes") {
    auto index = build_index(std::vector<FieldedDocument>{});
    CHECK(index.doc_count() == 0);
    Query q;
    q.clauses.push_back({FieldId::title, "x", 1.0});
    CHECK(search(index, q, 5).empty());

    auto nonempty = build_index({make_doc(1, {"x"})});
    CHECK(search(nonempty, Query{}, 5).empty());
}

TEST_CASE("duplicate document ids are rejected") {
    CHECK_THROWS_AS(build_index({make_doc(1, {"a"}), make_doc(1, {"b"})}),
                    ValidationError);
}

TEST_CASE("random cases agree with the reference scorer in both modes") {
    std::mt19937 rng(991);
    std::uniform_int_distribution<int> word_dist(0, 19);
    std::uniform_int_distribution<int> len_dist(0, 12);
    std::uniform_int_distribution<int> field_dist(0, kFieldCount - 1);
    auto word = [&] { return "w" + std::to_string(word_dist(rng)); };

    std::vector<FieldedDocument> docs;
    for (int d = 0; d < 25; ++d) {
        FieldedDocument doc;
        doc.doc_id = d + 1;
        doc.title = "t" + std::to_string(d);
        for (std::size_t f = 0; f < kFieldCount; ++f) {
            int len = len_dist(rng);
            for (int i = 0; i < len; ++i)
                doc.field_terms[f].push_back(word());
        }
        docs.push_back(std::move(doc));
    }
    auto index = build_index(docs);

    for (ScorerMode mode : {ScorerMode::standard, ScorerMode::tf_saturation}) {
        ScoringParams p;
        p.mode = mode;
        for (int round = 0; round < 200; ++round) {
            FieldId field = static_cast<FieldId>(field_dist(rng));
            std::string term = word();
            std::int64_t doc_id = 1 + word_dist(rng);
            double got = bm25(index, field, term, doc_id, p);
            double want = bm25_reference(index, field, term, doc_id, p);
            CHECK(got == doctest::Approx(want).epsilon(1e-9));
        }
    }
}

TEST_CASE("explain contributions sum to the search score") {
    auto index = build_index({
        make_doc(1, {"camel", "routes", "camel"}, {"addRoutes", "configure"}),
        make_doc(2, {"camel"}, {"configure"}),
    });
    Query q;
    q.clauses.push_back({FieldId::title, "camel", 2.0});
    q.clauses.push_back({FieldId::title, "routes", 1.0});
    q.clauses.push_back({FieldId::method_invocation, "configure", 3.0});
    canonicalize(q);

    auto hits = search(index, q, 1);
    REQUIRE(hits.size() == 1);
    auto contributions = explain(index, q, hits[0].doc_id);
    REQUIRE(contributions.size() == q.clauses.size());
    double sum = 0;
    for (std::size_t i = 0; i < contributions.size(); ++i) {
        CHECK(contributions[i].clause == q.clauses[i]);
        sum += contributions[i].score;
    }
    CHECK(sum == doctest::Approx(hits[0].score).epsilon(1e-12));
}

TEST_CASE("override params swap the scorer without rebuilding") {
    ScoringParams sat;
    sat.mode = ScorerMode::tf_saturation;
    auto index_sat = build_index({make_doc(1, {"a", "b"}), make_doc(2, {"a"})},
                                 sat);
    auto index_std = build_index({make_doc(1, {"a", "b"}), make_doc(2, {"a"})});

    Query q;
    q.clauses.push_back({FieldId::title, "a", 1.0});

    ScoringParams std_params;
    auto overridden = search(index_sat, q, 5, std_params);
    auto native = search(index_std, q, 5);
    REQUIRE(overridden.size() == native.size());
    for (std::size_t i = 0; i < native.size(); ++i) {
        CHECK(overridden[i].doc_id == native[i].doc_id);
        CHECK(overridden[i].score ==
              doctest::Approx(native[i].score).epsilon(1e-12));
    }
    // and without the override the stored params apply; the shorter doc wins
    auto stored = search(index_sat, q, 5);
    REQUIRE(stored.size() == 2);
    CHECK(stored[0].doc_id == 2);
    CHECK(stored[0].score ==
          doctest::Approx(bm25(index_sat, FieldId::title, "a", 2, sat))
              .epsilon(1e-12));
    CHECK(stored[1].score ==
          doctest::Approx(bm25(index_sat, FieldId::title, "a", 1, sat))
              .epsilon(1e-12));
}

TEST_CASE("persist and open round-trip") {
    TempDir tmp;
    ScoringParams params;
    params.k1 = 1.6;
    params.b = 0.4;
    auto index = build_index(
        {
            make_doc(1, {"alpha", "beta"}, {"run"}),
            make_doc(2, {"alpha"}, {"walk", "run"}),
        },
        params);
    persist(index, tmp.path / "idx");
    auto reopened = open_index(tmp.path / "idx");

    CHECK(reopened.doc_count() == index.doc_count());
    CHECK(reopened.params() == params);
    CHECK(reopened.avg_field_length(FieldId::title) ==
          index.avg_field_length(FieldId::title));
    CHECK(reopened.field_length(FieldId::method_invocation, 2) == 2);

    Query q;
    q.clauses.push_back({FieldId::title, "alpha", 1.0});
    q.clauses.push_back({FieldId::method_invocation, "run", 2.0});
    canonicalize(q);
    auto before = search(index, q, 5);
    auto after = search(reopened, q, 5);
    REQUIRE(before.size() == after.size());
    for (std::size_t i = 0; i < before.size(); ++i) {
        CHECK(before[i].doc_id == after[i].doc_id);
        CHECK(before[i].score == doctest::Approx(after[i].score).epsilon(1e-12));
        CHECK(before[i].title == after[i].title);
    }
}

TEST_CASE("rewriting an index produces identical bytes") {
    TempDir tmp;
    auto build = [] {
        return build_index({
            make_doc(2, {"beta", "alpha"}, {"walk"}),
            make_doc(1, {"alpha"}, {"run", "run"}),
        });
    };
    persist(build(), tmp.path / "a");
    persist(build(), tmp.path / "b");
    for (const char* name : {"manifest.json", "docs.jsonl", "postings.jsonl"}) {
        CHECK(slurp(tmp.path / "a" / name) == slurp(tmp.path / "b" / name));
    }
}

TEST_CASE("open rejects missing and mismatched indexes") {
    TempDir tmp;
    CHECK_THROWS_AS(open_index(tmp.path / "nowhere"), InputError);

    auto index = build_index({make_doc(1, {"a"})});
    persist(index, tmp.path / "idx");

    // tamper with the format version; the error must name both versions
    auto manifest_path = tmp.path / "idx" / "manifest.json";
    auto manifest = nlohmann::json::parse(slurp(manifest_path));
    REQUIRE(manifest.at("format_version").get<int>() == kIndexFormatVersion);
    manifest["format_version"] = 99;
    {
        std::ofstream out(manifest_path, std::ios::binary | std::ios::trunc);
        out << manifest.dump(2) << '\n';
    }
    try {
        open_index(tmp.path / "idx");
        FAIL_CHECK("expected InputError for version mismatch");
    } catch (const InputError& e) {
        std::string what = e.what();
        CHECK(what.find("99") != std::string::npos);
        CHECK(what.find("1") != std::string::npos);
    }
}

TEST_CASE("open rejects corrupt postings") {
    TempDir tmp;
    auto index = build_index({make_doc(1, {"a"})});
    persist(index, tmp.path / "idx");
    {
        std::ofstream out(tmp.path / "idx" / "postings.jsonl", std::ios::app);
        out << "{broken\n";
    }
    CHECK_THROWS_AS(open_index(tmp.path / "idx"), InputError);
}

TEST_CASE("documents built from posts fill text and code fields") {
    CleanPost post;
    post.question_id = 42;
    post.title = "Apache Camel routes";
    post.question_text = "How to add routes to the context";
    post.answer_texts = {"Add them with a route builder"};
    post.code_snippets = {
        {SnippetOrigin::question,
         "context.addRoutes(new RouteBuilder());"}};
    post.tags = {"java"};

    BuildOptions options;
    options.import_mining = false;
    auto doc = document_from_post(post, nullptr, options);
    CHECK(doc.doc_id == 42);
    CHECK(doc.title == "Apache Camel routes");

    auto& title_terms = doc.field_terms[static_cast<std::size_t>(FieldId::title)];
    CHECK(title_terms ==
          std::vector<std::string>{"apache", "camel", "routes"});
    auto& invocations =
        doc.field_terms[static_cast<std::size_t>(FieldId::method_invocation)];
    CHECK(std::count(invocations.begin(), invocations.end(), "addRoutes") == 1);
    auto& instances =
        doc.field_terms[static_cast<std::size_t>(FieldId::class_instance)];
    CHECK(std::count(instances.begin(), instances.end(), "RouteBuilder") == 1);

    // without wrapping the fragment yields no code terms
    BuildOptions no_wrap = options;
    no_wrap.wrapping = false;
    auto flat_doc = document_from_post(post, nullptr, no_wrap);
    CHECK(flat_doc
              .field_terms[static_cast<std::size_t>(FieldId::class_instance)]
              .empty());
    CHECK(flat_doc.field_terms[static_cast<std::size_t>(FieldId::title)] ==
          title_terms);
}

TEST_CASE("parallel build matches serial build") {
    std::vector<CleanPost> posts;
    for (int i = 1; i <= 12; ++i) {
        CleanPost post;
        post.question_id = i;
        post.title = "post number " + std::to_string(i);
        post.question_text = "question text " + std::to_string(i % 3);
        post.answer_texts = {"answer " + std::to_string(i % 4)};
        post.code_snippets = {
            {SnippetOrigin::question,
             "Helper h" + std::to_string(i) + " = new Helper();"}};
        posts.push_back(std::move(post));
    }
    BuildOptions serial;
    serial.import_mining = false;
    BuildOptions parallel = serial;
    parallel.jobs = 4;
    TempDir tmp;
    persist(build_index(posts, nullptr, serial), tmp.path / "serial");
    persist(build_index(posts, nullptr, parallel), tmp.path / "parallel");
    for (const char* name : {"manifest.json", "docs.jsonl", "postings.jsonl"}) {
        CHECK(slurp(tmp.path / "serial" / name) ==
              slurp(tmp.path / "parallel" / name));
    }
}

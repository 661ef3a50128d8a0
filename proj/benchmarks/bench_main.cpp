#include "postrec/analyzer.hpp"
#include "postrec/canonical.hpp"
#include "postrec/facets.hpp"
#include "postrec/index.hpp"
#include "postrec/javatok.hpp"
#include "postrec/query.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace {

const std::string kSnippet =
    "CamelContext context = new DefaultCamelContext();\n"
    "context.addRoutes(new RouteBuilder() {\n"
    "    public void configure() {\n"
    "        from(\"direct:start\").to(\"mock:result\");\n"
    "    }\n"
    "});\n"
    "context.start();\n";

const std::string kProse =
    "I am trying to add a route to an Apache Camel context at runtime "
    "but the route builder never fires. The documentation mentions adding "
    "routes before starting the context; is there a supported way to do it "
    "afterwards without restarting everything?";

std::vector<postrec::CleanPost> synthetic_posts(std::size_t count) {
    std::mt19937 rng(42);
    std::uniform_int_distribution<int> word(0, 39);
    static const char* kWords[] = {
        "camel",  "route",   "spring",  "thread", "socket", "string",
        "stream", "parser",  "builder", "buffer", "handler", "context",
        "filter", "mapper",  "reader",  "writer", "codec",  "queue",
        "stack",  "tree",    "graph",   "cache",  "pool",   "timer",
        "event",  "client",  "server",  "proxy",  "token",  "lexer",
        "array",  "vector",  "matrix",  "logger", "metric", "config",
        "loader", "cursor",  "schema",  "broker"};
    std::vector<postrec::CleanPost> posts;
    posts.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        postrec::CleanPost post;
        post.question_id = static_cast<std::int64_t>(i + 1);
        std::ostringstream title, body;
        for (int w = 0; w < 8; ++w)
            title << kWords[word(rng)] << ' ';
        for (int w = 0; w < 60; ++w)
            body << kWords[word(rng)] << ' ';
        post.title = title.str();
        post.question_text = body.str();
        post.answer_texts.push_back(post.question_text);
        post.code_snippets.push_back(
            {postrec::SnippetOrigin::question, kSnippet});
        post.tags = {"java"};
        posts.push_back(std::move(post));
    }
    return posts;
}

void bm_tokenize_java(benchmark::State& state) {
    for (auto _ : state) {
        auto tokens = postrec::tokenize_java(kSnippet);
        benchmark::DoNotOptimize(tokens);
    }
}
BENCHMARK(bm_tokenize_java);

void bm_analyze_text(benchmark::State& state) {
    for (auto _ : state) {
        auto terms = postrec::analyze_text(kProse);
        benchmark::DoNotOptimize(terms);
    }
}
BENCHMARK(bm_analyze_text);

void bm_parse_facets(benchmark::State& state) {
    for (auto _ : state) {
        auto parsed = postrec::parse_facets(kSnippet, true);
        benchmark::DoNotOptimize(parsed);
    }
}
BENCHMARK(bm_parse_facets);

void bm_build_query(benchmark::State& state) {
    postrec::ConfigFlags flags;
    flags.wrapping = true;
    flags.entropy = true;
    flags.tokenizing = true;
    std::string source = "import org.apache.camel.CamelContext;\n" + kSnippet;
    for (auto _ : state) {
        auto query = postrec::build_query(source, flags);
        benchmark::DoNotOptimize(query);
    }
}
BENCHMARK(bm_build_query);

void bm_search(benchmark::State& state) {
    auto posts = synthetic_posts(static_cast<std::size_t>(state.range(0)));
    postrec::BuildOptions options;
    options.import_mining = false;
    postrec::Index index = postrec::build_index(posts, nullptr, options);
    postrec::ConfigFlags flags;
    flags.wrapping = true;
    flags.tokenizing = true;
    postrec::Query query =
        postrec::build_query("import org.apache.camel.CamelContext;\n" +
                                 kSnippet,
                             flags);
    for (auto _ : state) {
        auto hits = postrec::search(index, query, 5);
        benchmark::DoNotOptimize(hits);
    }
}
BENCHMARK(bm_search)->Arg(200)->Arg(2000);

void bm_levenshtein(benchmark::State& state) {
    for (auto _ : state) {
        auto d = postrec::levenshtein("DefaultCamelContext",
                                      "org.apache.camel.impl.DefaultCamelContext");
        benchmark::DoNotOptimize(d);
    }
}
BENCHMARK(bm_levenshtein);

} // namespace

BENCHMARK_MAIN();

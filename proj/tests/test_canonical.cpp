#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "postrec/canonical.hpp"
#include "postrec/errors.hpp"
#include "postrec/facets.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace postrec;
namespace fs = std::filesystem;

namespace {

std::string fixture_path(const char* name) {
    return std::string(POSTREC_FIXTURE_DIR) + "/" + name;
}

std::string read_fixture(const char* name) {
    std::ifstream in(fixture_path(name));
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path write_temp_tsv(const std::string& content) {
    static int counter = 0;
    fs::path file = fs::temp_directory_path() /
                    ("postrec_tsv_" + std::to_string(::getpid()) + "_" +
                     std::to_string(counter++) + ".tsv");
    std::ofstream out(file);
    out << content;
    return file;
}

// reference implementation: full dynamic-programming matrix
std::size_t levenshtein_matrix(std::string_view a, std::string_view b) {
    std::vector<std::vector<std::size_t>> d(a.size() + 1,
                                            std::vector<std::size_t>(b.size() + 1));
    for (std::size_t i = 0; i <= a.size(); ++i)
        d[i][0] = i;
    for (std::size_t j = 0; j <= b.size(); ++j)
        d[0][j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i)
        for (std::size_t j = 1; j <= b.size(); ++j) {
            std::size_t sub = d[i - 1][j - 1] + (a[i - 1] != b[j - 1] ? 1 : 0);
            d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, sub});
        }
    return d[a.size()][b.size()];
}

} // namespace

TEST_CASE("table orders by frequency then name and truncates") {
    auto table = CanonicalTable::from_entries({
        {"b.Low", 10},
        {"a.High", 90},
        {"c.AlsoHigh", 90},
        {"d.Mid", 50},
    });
    REQUIRE(table.entries().size() == 4);
    CHECK(table.entries()[0].name == "a.High");
    CHECK(table.entries()[1].name == "c.AlsoHigh");
    CHECK(table.entries()[2].name == "d.Mid");
    CHECK(table.entries()[3].name == "b.Low");

    auto top2 = CanonicalTable::from_entries(
        {{"b.Low", 10}, {"a.High", 90}, {"d.Mid", 50}}, 2);
    REQUIRE(top2.entries().size() == 2);
    CHECK(top2.entries()[0].name == "a.High");
    CHECK(top2.entries()[1].name == "d.Mid");
}

TEST_CASE("tsv load skips comments and blanks") {
    auto file = write_temp_tsv("# heading\n\njava.util.List\t100\n"
                               "java.util.Map\t90\n");
    auto table = CanonicalTable::load(file);
    REQUIRE(table.entries().size() == 2);
    CHECK(table.entries()[0].name == "java.util.List");
    CHECK(table.entries()[0].frequency == 100);
    fs::remove(file);
}

TEST_CASE("malformed tsv lines name the line number") {
    auto expect_line = [](const std::string& content, const char* line_text) {
        auto file = write_temp_tsv(content);
        try {
            CanonicalTable::load(file);
            FAIL_CHECK("expected InputError for: " << content);
        } catch (const InputError& e) {
            CHECK(std::string(e.what()).find(line_text) != std::string::npos);
        }
        fs::remove(file);
    };
    expect_line("java.util.List\t10\nno_tab_here\n", "line 2");
    expect_line("java.util.List\tnot_a_number\n", "line 1");
    expect_line("java.util.List\t-5\n", "line 1");
    expect_line("\t10\n", "line 1");
    CHECK_THROWS_AS(CanonicalTable::load("/nonexistent/table.tsv"), InputError);
}

TEST_CASE("candidates match the final segment in table order") {
    auto table = CanonicalTable::from_entries({
        {"org.dom4j.Document", 40},
        {"org.w3c.dom.Document", 80},
        {"com.lowagie.text.Document", 60},
        {"java.util.List", 100},
    });
    CHECK(table.candidates("Document") ==
          std::vector<std::string>{"org.w3c.dom.Document",
                                   "com.lowagie.text.Document",
                                   "org.dom4j.Document"});
    CHECK(table.candidates("List") == std::vector<std::string>{"java.util.List"});
    CHECK(table.candidates("Missing").empty());
    // segment match is exact, not a suffix match
    CHECK(table.candidates("ocument").empty());
}

TEST_CASE("levenshtein basics") {
    CHECK(levenshtein("", "") == 0);
    CHECK(levenshtein("abc", "") == 3);
    CHECK(levenshtein("", "abc") == 3);
    CHECK(levenshtein("kitten", "sitting") == 3);
    CHECK(levenshtein("flaw", "lawn") == 2);
    CHECK(levenshtein("same", "same") == 0);
}

TEST_CASE("levenshtein agrees with the full-matrix reference") {
    std::mt19937 rng(20240816);
    std::uniform_int_distribution<int> len_dist(0, 14);
    std::uniform_int_distribution<int> chr_dist(0, 3);
    for (int round = 0; round < 300; ++round) {
        auto make = [&] {
            std::string s;
            int len = len_dist(rng);
            for (int i = 0; i < len; ++i)
                s += static_cast<char>('a' + chr_dist(rng));
            return s;
        };
        std::string a = make(), b = make();
        CHECK(levenshtein(a, b) == levenshtein_matrix(a, b));
    }
}

TEST_CASE("unique candidates resolve without context") {
    CodeFacets facets;
    facets.variable_types.insert("List");
    auto table = CanonicalTable::from_entries({{"java.util.List", 10}});
    auto imports = deduce_imports(facets, table, "");
    CHECK(imports == std::vector<std::string>{"java.util.List"});
}

TEST_CASE("instances and types both feed deduction") {
    CodeFacets facets;
    facets.variable_types.insert("Map");
    facets.class_instances.insert("HashMap");
    auto table = CanonicalTable::from_entries(
        {{"java.util.Map", 10}, {"java.util.HashMap", 9}});
    auto imports = deduce_imports(facets, table, "");
    CHECK(imports ==
          std::vector<std::string>{"java.util.HashMap", "java.util.Map"});
}

TEST_CASE("ambiguity resolves by edit distance to context windows") {
    CodeFacets facets;
    facets.variable_types.insert("Document");
    auto table = CanonicalTable::from_entries({
        {"org.w3c.dom.Document", 80},
        {"org.dom4j.Document", 40},
    });
    // the context mentions one qualified name verbatim: distance zero
    auto a = deduce_imports(facets, table, "parsing with org.dom4j.Document");
    CHECK(a == std::vector<std::string>{"org.dom4j.Document"});
    auto b = deduce_imports(facets, table, "the w3c dom org.w3c.dom.Document");
    CHECK(b == std::vector<std::string>{"org.w3c.dom.Document"});
}

TEST_CASE("context windows join up to three tokens") {
    CodeFacets facets;
    facets.variable_types.insert("Thing");
    auto table = CanonicalTable::from_entries({
        {"aa bb cc.Thing", 5},
        {"zz.Thing", 5},
    });
    // only a three-token window matches the first candidate exactly; the
    // pathological spaced name makes the window mechanics observable
    auto got = deduce_imports(facets, table, "aa bb cc.Thing");
    CHECK(got == std::vector<std::string>{"aa bb cc.Thing"});
}

TEST_CASE("distance ties pick the lexically smaller candidate") {
    CodeFacets facets;
    facets.variable_types.insert("Row");
    auto table = CanonicalTable::from_entries({
        {"bbb.Row", 9},
        {"aaa.Row", 5},
    });
    // context far from both: every window is equally bad
    auto got = deduce_imports(facets, table, "zzzzzzzzzzzz");
    CHECK(got == std::vector<std::string>{"aaa.Row"});
}

TEST_CASE("names without candidates are counted unresolved") {
    CodeFacets facets;
    facets.variable_types.insert("Unknown");
    facets.variable_types.insert("List");
    facets.class_instances.insert("AlsoUnknown");
    auto table = CanonicalTable::from_entries({{"java.util.List", 10}});
    std::size_t unresolved = 99;
    auto imports = deduce_imports(facets, table, "", &unresolved);
    CHECK(imports == std::vector<std::string>{"java.util.List"});
    CHECK(unresolved == 2);
}

TEST_CASE("already-qualified names skip deduction") {
    CodeFacets facets;
    facets.class_instances.insert("java.util.ArrayList");
    auto table = CanonicalTable::from_entries({{"x.ArrayList", 10}});
    std::size_t unresolved = 0;
    auto imports = deduce_imports(facets, table, "", &unresolved);
    CHECK(imports.empty());
    CHECK(unresolved == 0);
}

TEST_CASE("jdt snippet deduces its imports from the shipped table") {
    std::string src = read_fixture("listing2.java");
    auto table = CanonicalTable::load(fixture_path("jdt_classes.tsv"));
    ParseOutput parsed = parse_facets(src);
    std::size_t unresolved = 0;
    auto imports = deduce_imports(parsed.facets, table, src, &unresolved);
    std::set<std::string> got(imports.begin(), imports.end());
    CHECK(got.count("org.eclipse.jdt.core.dom.ASTParser") == 1);
    CHECK(got.count("org.eclipse.jdt.core.JavaCore") == 1);
    CHECK(got.count("java.util.Hashtable") == 1);
    CHECK(got.count("org.eclipse.jdt.core.dom.AST") == 1);
    CHECK(unresolved == 0);
}

TEST_CASE("augmenting a fragment prepends imports and wraps") {
    std::string src = read_fixture("listing2.java");
    auto table = CanonicalTable::load(fixture_path("jdt_classes.tsv"));
    std::string fixed = augment_snippet(src, table, src);

    // imports first, then the wrapped body holding the source verbatim
    CHECK(fixed.find("import org.eclipse.jdt.core.dom.ASTParser;\n") !=
          std::string::npos);
    CHECK(fixed.find("import java.util.Hashtable;\n") != std::string::npos);
    CHECK(fixed.find(src) != std::string::npos);
    CHECK(fixed.find("import") < fixed.find("class Fix"));

    // the repaired snippet parses at the top level without wrapping again
    ParseOutput reparsed = parse_facets(fixed);
    CHECK(reparsed.outcome.mode_used == ParseMode::compilation_unit);
    CHECK_FALSE(reparsed.outcome.wrapped);
    CHECK(reparsed.facets.method_declarations == std::set<std::string>{"wrap"});

    ParseOutput original = parse_facets(src);
    CHECK(reparsed.facets.method_invocations ==
          original.facets.method_invocations);
    CHECK(reparsed.facets.variable_types == original.facets.variable_types);
    CHECK(reparsed.facets.variable_declarations ==
          original.facets.variable_declarations);
}

TEST_CASE("complete sources with imports come back unchanged") {
    std::string src = read_fixture("listing1.java");
    auto table = CanonicalTable::load(fixture_path("canonical_50.tsv"));
    CHECK(augment_snippet(src, table, src) == src);
}

TEST_CASE("complete sources without imports still gain deduced ones") {
    std::string src = "public class A { void m() { "
                      "Hashtable t = new Hashtable(); } }";
    auto table = CanonicalTable::load(fixture_path("jdt_classes.tsv"));
    std::string fixed = augment_snippet(src, table, src);
    CHECK(fixed.find("import java.util.Hashtable;\n") == 0);
    CHECK(fixed.find(src) != std::string::npos);
    ParseOutput reparsed = parse_facets(fixed);
    CHECK(reparsed.outcome.mode_used == ParseMode::compilation_unit);
    CHECK_FALSE(reparsed.outcome.wrapped);
}

TEST_CASE("blank input augments to an empty string") {
    auto table = CanonicalTable::from_entries({{"a.B", 1}});
    CHECK(augment_snippet("", table, "").empty());
    CHECK(augment_snippet("  \n ", table, "").empty());
}

TEST_CASE("augmentation is idempotent") {
    std::string src = read_fixture("listing2.java");
    auto table = CanonicalTable::load(fixture_path("jdt_classes.tsv"));
    std::string once = augment_snippet(src, table, src);
    CHECK(augment_snippet(once, table, once) == once);
}

#include "geocmd/command_model.hpp"
#include "geocmd/dataset.hpp"

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

using namespace geocmd;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "geocmd_unit";
    fs::create_directories(dir);
    return dir / name;
}

void write_lines(const fs::path& p, const std::vector<std::string>& lines) {
    std::ofstream out(p, std::ios::trunc);
    for (const auto& l : lines) out << l << '\n';
}

} // namespace

TEST_CASE("default corpus: 2000 samples, 200 per function, unique queries") {
    const auto samples = generate(1, 200);
    REQUIRE(samples.size() == 2000);
    std::map<std::string, int> per_class;
    std::set<std::string> queries;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const Sample& s = samples[i];
        CHECK(s.id == i);
        ++per_class[s.function];
        CHECK(queries.insert(s.query).second);
        CHECK_FALSE(s.query.empty());
        CHECK(s.query.front() != ' ');
        CHECK(s.query.back() != ' ');
    }
    CHECK(per_class.size() == 10);
    for (const auto& [name, n] : per_class) CHECK_MESSAGE(n == 200, name);
}

TEST_CASE("every reference call parses, matches its label and is canonical") {
    for (const Sample& s : generate(1, 200)) {
        const GisCall call = parse_call(s.call);
        CHECK(function_name(call) == s.function);
        CHECK(serialize_call(call) == s.call);
        CHECK_NOTHROW(validate_sample(s));
    }
}

TEST_CASE("generated parameters follow the sampler ranges") {
    for (const Sample& s : generate(3, 200)) {
        const GisCall call = parse_call(s.call);
        if (const auto* z = std::get_if<ZoomIn>(&call)) CHECK((z->levels >= 1 && z->levels <= 10));
        if (const auto* z = std::get_if<ZoomOut>(&call)) CHECK((z->levels >= 1 && z->levels <= 10));
        if (const auto* m = std::get_if<Move>(&call)) {
            CHECK(std::abs(m->a.value()) <= 180.0);
            CHECK(std::abs(m->b.value()) <= 90.0);
            const auto dot = m->a.text().find('.');
            REQUIRE(dot != std::string::npos);
            CHECK(m->a.text().size() - dot - 1 == 4);
        }
        if (const auto* c = std::get_if<Cartography>(&call)) CHECK_FALSE(c->extra.has_value());
    }
}

TEST_CASE("at least fifteen templates per function") {
    for (const auto name : kFunctionNames) CHECK_MESSAGE(template_count(name) >= 15, name);
    CHECK(template_count("Nope") == 0);
}

TEST_CASE("generation is deterministic and seed dependent") {
    CHECK(generate(5, 50) == generate(5, 50));
    CHECK_FALSE(generate(5, 50) == generate(6, 50));
}

TEST_CASE("per_function must be positive") {
    CHECK_THROWS_AS(generate(1, 0), DatasetError);
}

TEST_CASE("template space exhaustion is reported") {
    try {
        generate(1, 20000);
        FAIL("expected TemplateExhaustion");
    } catch (const DatasetError& e) {
        CHECK(e.kind() == DatasetErrorKind::TemplateExhaustion);
        CHECK(e.code() == "TemplateExhaustion");
    }
}

TEST_CASE("split sizes and partition") {
    const auto samples = generate(1, 200);
    const auto parts = split(samples, SplitSpec{});
    CHECK(parts.train.size() == 1600);
    CHECK(parts.val.size() == 200);
    CHECK(parts.test.size() == 200);

    std::multiset<std::uint64_t> all;
    for (const auto* part : {&parts.train, &parts.val, &parts.test})
        for (const auto& s : *part) all.insert(s.id);
    std::multiset<std::uint64_t> expected;
    for (const auto& s : samples) expected.insert(s.id);
    CHECK(all == expected);

    const auto again = split(samples, SplitSpec{});
    CHECK(again.train == parts.train);
    CHECK(again.test == parts.test);
    CHECK_FALSE(split(samples, SplitSpec{2, 0.8, 0.5}).train == parts.train);
}

TEST_CASE("split: odd sizes still partition") {
    const auto samples = generate(2, 7);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto parts = split(samples, SplitSpec{seed, 0.8, 0.5});
        CHECK(parts.train.size() + parts.val.size() + parts.test.size() == samples.size());
        CHECK(parts.train.size() == 56);
        CHECK(parts.val.size() == 7);
    }
    CHECK_THROWS_AS(split({}, SplitSpec{}), DatasetError);
    CHECK_THROWS_AS(split(samples, SplitSpec{1, 1.0, 0.5}), DatasetError);
}

TEST_CASE("jsonl round trip") {
    const auto samples = generate(4, 20);
    const auto path = temp_file("roundtrip.jsonl");
    save_jsonl(samples, path);
    CHECK(load_jsonl(path) == samples);

    std::ifstream in(path);
    std::string first;
    std::getline(in, first);
    CHECK(first.rfind("{\"id\":0,\"function\":\"AddMarker\",\"query\":", 0) == 0);
}

TEST_CASE("load rejects bad records") {
    const auto path = temp_file("bad.jsonl");
    const auto kind_of = [&](const std::vector<std::string>& lines) {
        write_lines(path, lines);
        try {
            load_jsonl(path);
        } catch (const DatasetError& e) {
            return e.kind();
        }
        FAIL("expected a DatasetError");
        return DatasetErrorKind::Io;
    };
    CHECK(kind_of({R"j({"id":0,"function":"ZoomIn","query":"zoom","call":"Zoom(2)"})j"}) ==
          DatasetErrorKind::InvalidCall);
    CHECK(kind_of({R"j({"id":0,"function":"ZoomOut","query":"zoom","call":"ZoomIn(2)"})j"}) ==
          DatasetErrorKind::InvalidCall);
    CHECK(kind_of({R"j({"id":0,"function":"ZoomIn","query":"zoom","call":"ZoomIn(2)"})j",
                   R"j({"id":1,"function":"ZoomIn","query":"zoom","call":"ZoomIn(3)"})j"}) ==
          DatasetErrorKind::MalformedRecord);
    CHECK(kind_of({R"j({"id":0,"function":"ZoomIn","query":"a","call":"ZoomIn(2)"})j",
                   R"j({"id":0,"function":"ZoomIn","query":"b","call":"ZoomIn(3)"})j"}) ==
          DatasetErrorKind::MalformedRecord);
    CHECK(kind_of({R"j({"id":0,"function":"ZoomIn","call":"ZoomIn(2)"})j"}) == DatasetErrorKind::MalformedRecord);
    CHECK(kind_of({"not json"}) == DatasetErrorKind::MalformedRecord);
    CHECK(kind_of({R"j({"id":0,"function":"ZoomIn","query":"  ","call":"ZoomIn(2)"})j"}) ==
          DatasetErrorKind::MalformedRecord);

    write_lines(path, {R"j({"id":0,"function":"ZoomIn","query":"a","call":"ZoomIn(2)"})j", "oops"});
    try {
        load_jsonl(path);
        FAIL("expected a DatasetError");
    } catch (const DatasetError& e) {
        CHECK(std::string(e.what()).find(":2:") != std::string::npos);
    }
    CHECK_THROWS_AS(load_jsonl(temp_file("does_not_exist.jsonl")), DatasetError);
}

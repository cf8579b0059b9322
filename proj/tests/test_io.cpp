#include "catch_amalgamated.hpp"

#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

#include "rcd/io.hpp"

using namespace rcd;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "rcd_test_io";
    fs::create_directories(dir);
    return dir / name;
}

} // namespace

TEST_CASE("CSV round trip is bit exact") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::vector<double> x;
    std::vector<double> v;
    for (int i = 0; i < 500; ++i) {
        x.push_back(i * 0.1 + d(rng) * 1e-3);
        v.push_back(std::abs(std::exp(30.0 * d(rng)) * d(rng)));
    }
    v[0] = 0.0;
    v[1] = 5e-324;
    v[2] = 1.7976931348623157e308;
    v[3] = 0.1;
    const auto path = scratch("roundtrip.csv");
    io::write_csv(path, x, v);
    const auto back = io::read_csv(path);
    REQUIRE(back.x.size() == x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        CHECK(back.x[i] == x[i]);
        CHECK(back.value[i] == v[i]);
    }
    CHECK(io::format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("CSV errors") {
    const auto path = scratch("bad.csv");
    {
        std::ofstream out(path);
        out << "a,b\n1,2\n";
    }
    CHECK_THROWS_AS(io::read_csv(path), Error);
    {
        std::ofstream out(path);
        out << "x,value\n1;2\n";
    }
    CHECK_THROWS_AS(io::read_csv(path), Error);
    CHECK_THROWS_AS(io::read_csv(scratch("missing.csv")), Error);
    const std::vector<double> a = {1.0, 2.0};
    const std::vector<double> b = {1.0};
    CHECK_THROWS_AS(io::write_csv(scratch("x.csv"), a, b), DomainError);
}

TEST_CASE("config parsing") {
    std::istringstream in(R"(# experiment
m = 2.5
K=0.24   # trailing comment
  family =  transformed-b0
times = 1, 2,3.5

)");
    const auto c = io::Config::parse(in);
    CHECK(c.num("m", 0.0) == 2.5);
    CHECK(c.num("K").value() == 0.24);
    CHECK(c.str("family", "") == "transformed-b0");
    CHECK(c.list("times") == std::vector<double>{1.0, 2.0, 3.5});
    CHECK(c.num("absent", 7.0) == 7.0);
    CHECK_FALSE(c.num("absent"));
    CHECK(c.list("absent").empty());
    CHECK(c.has("m"));
    CHECK_FALSE(c.has("absent"));
    CHECK(c.unused().empty());

    auto d = c;
    d.set("typo_key", "1");
    CHECK(d.unused() == std::vector<std::string>{"typo_key"});
    CHECK_THROWS_AS(c.num("family", 0.0), DomainError);
    CHECK_THROWS_AS(d.set("", "1"), DomainError);

    std::istringstream bad("m 2\n");
    CHECK_THROWS_AS(io::Config::parse(bad), DomainError);
    std::istringstream partial("m = 2x\n");
    CHECK_THROWS_AS(io::Config::parse(partial).num("m", 0.0), DomainError);
}

TEST_CASE("JSON serialization") {
    CHECK(io::to_json(StopReason{ReachedFinalTime{}})["kind"] == "ReachedFinalTime");
    const auto hit = io::to_json(StopReason{InterfaceHitBoundary{Side::Left, 2.5}});
    CHECK(hit["kind"] == "InterfaceHitBoundary");
    CHECK(hit["side"] == "left");
    CHECK(hit["time"] == 2.5);

    InterfaceTrace t;
    t.times = {0.0, 1.0};
    t.left_edge = {std::nullopt, 0.5};
    t.right_edge = {1.0, 2.0};
    t.max_value = {1.0, 0.5};
    t.argmax = {0.5, 1.0};
    const auto j = io::to_json(t);
    CHECK(j["left_edge"][0].is_null());
    CHECK(j["left_edge"][1] == 0.5);
    CHECK(j["times"].size() == 2);

    FitReport f;
    f.model = "LogEdge";
    f.estimate = 3.0;
    f.window = {1.0, 2.0};
    const auto fj = io::to_json(f);
    CHECK(fj["model"] == "LogEdge");
    CHECK(fj["estimate"] == 3.0);
}

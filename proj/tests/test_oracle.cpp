#include "common.hpp"

#include "fpiua/oracle.hpp"
#include "fpiua/parallel.hpp"

#include <atomic>
#include <cstdlib>

using namespace fpiua;
using namespace fpiua::test;

TEST_SUITE("oracle") {

TEST_CASE("direct image")
{
    const Format& f = e5m3();
    Table c = Table::from_function(f, 1, num(-1), num(1), [](const auto&) { return num(7); });
    CHECK(direct_image(c, {Interval(num(-1), num(1, 2))}) == Interval::point(num(7)));
    Table m = Table::from_function(f, 1, num(-1), num(1), [&](const auto& x) { return mul(f, x[0], num(2)); });
    CHECK(direct_image(m, {Interval(num(-1, 4), num(1, 2))}) == Interval(num(-1, 2), num(1)));
    CHECK_THROWS(direct_image(m, {Interval(num(-2), num(1))}));
}

TEST_CASE("box streams")
{
    const Format& f = e5m3();
    CHECK(enumerate_boxes(f, num(-1), num(1), 1).size() == 29161);
    auto a = sample_boxes(f, num(-1), num(1), 2, 100, 5), b = sample_boxes(f, num(-1), num(1), 2, 100, 5);
    CHECK(a == b);
    CHECK(a.size() == 1 + 4 + 100);
    CHECK(a[0] == Box(2, Interval(num(-1), num(1))));
    size_t singles = 0;
    for (const Box& x : enumerate_boxes(f, num(-1), num(1), 1)) singles += x[0].lo == x[0].hi;
    CHECK(singles == 241);
}

TEST_CASE("reports")
{
    const Format& f = e5m3();
    Table t = random_table(f, 1, num(-1), num(1), 2);
    Network wrong = identity_network(f, 1, "relu");
    OracleReport r = check_iua(wrong, t, sample_boxes(f, num(-1), num(1), 1, 50, 1));
    CHECK(!r.ok());
    CHECK(r.text().rfind("FAIL box=", 0) == 0);
    CHECK(r.text().find("expected=") != std::string::npos);
    OracleReport s = check_soundness(wrong, sample_boxes(f, num(-1), num(1), 1, 50, 1));
    CHECK(s.text() == "PASS n=53");
}

TEST_CASE("soundness on random networks")
{
    const Format& f = e5m3();
    for (uint64_t s = 0; s < 10; ++s) {
        Network n = random_network(f, s % 2 ? "mish" : "elu", 2, 3, 4, s);
        CHECK(check_soundness(n, sample_boxes(f, num(-1, 8), num(1, 8), 2, 100, s)).ok());
    }
}

}

TEST_SUITE("parallel") {

TEST_CASE("parallel_for visits every index once")
{
    setenv("FPIUA_THREADS", "3", 1);
    CHECK(thread_count() == 3);
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), [&](size_t i) { hits[i]++; });
    for (auto& h : hits) CHECK(h.load() == 1);
    CHECK_THROWS(parallel_for(100, [](size_t i) {
        if (i == 57) throw Error("boom");
    }));
    unsetenv("FPIUA_THREADS");
}

}

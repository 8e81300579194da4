#include "common.hpp"

#include "fpiua/oracle.hpp"
#include "fpiua/synth.hpp"

using namespace fpiua;
using namespace fpiua::test;

TEST_SUITE("synthesis") {

TEST_CASE("box indicator cases")
{
    const Format& f = e5m3();
    auto kit = make_kit(f, "relu");
    Fp K = kit->K;
    GridBox B{{num(-1, 4), num(1, 2)}, {num(0), num(1)}};
    Network n = build_box_indicator(*kit, B);
    size_t levels = 1; // two coordinates fit one gadget
    CHECK(n.depth() == kit->L_phi() + (kit->L_psi() - 1) * (levels + 1));
    CHECK(n.eval_interval({Interval(num(3, 4), num(1)), Interval(num(0), num(1))})[0] == Interval::point(Fp::zero()));
    CHECK(n.eval_interval({Interval(num(-1, 8), num(1, 4)), Interval(num(1, 2), num(1))})[0] == Interval::point(K));
    CHECK(n.eval_interval({Interval(num(-1), num(0)), Interval(num(0), num(1))})[0] == Interval(Fp::zero(), K));
    for (const Box& b : sample_boxes(f, num(-1), num(1), 2, 3000, 4)) REQUIRE(n.eval_interval(b)[0] == indicator_box(K, b, B));
}

TEST_CASE("box indicator in one dimension, every box")
{
    const Format& f = e5m3();
    auto kit = make_kit(f, "sigmoid");
    GridBox B{{num(-3, 8), num(5, 8)}};
    Network n = build_box_indicator(*kit, B);
    for (const Box& b : enumerate_boxes(f, num(-1), num(1), 1)) REQUIRE(n.eval_interval(b)[0] == indicator_box(kit->K, b, B));
}

TEST_CASE("set indicator")
{
    const Format& f = e5m3();
    auto kit = make_kit(f, "relu");
    auto grid = enumerate(f, num(-1), num(1));
    std::vector<bool> none(grid.size(), false), all(grid.size(), true), some(grid.size());
    for (size_t i = 0; i < grid.size(); ++i) some[i] = (i * 7919) % 5 < 2;
    Network e = build_set_indicator(*kit, 1, none), u = build_set_indicator(*kit, 1, all), s = build_set_indicator(*kit, 1, some);
    CHECK(e.depth() == u.depth());
    CHECK(s.depth() == u.depth());
    for (const Box& b : enumerate_boxes(f, num(-1), num(1), 1)) {
        REQUIRE(e.eval_interval(b)[0] == Interval::point(Fp::zero()));
        REQUIRE(u.eval_interval(b)[0] == Interval::point(kit->K));
        long lo = long(std::lower_bound(grid.begin(), grid.end(), b[0].lo) - grid.begin());
        long hi = long(std::lower_bound(grid.begin(), grid.end(), b[0].hi) - grid.begin());
        bool any = false, every = true;
        for (long i = lo; i <= hi; ++i) {
            any = any || some[size_t(i)];
            every = every && some[size_t(i)];
        }
        Interval want = every ? Interval::point(kit->K) : any ? Interval(Fp::zero(), kit->K) : Interval::point(Fp::zero());
        REQUIRE(s.eval_interval(b)[0] == want);
    }
}

TEST_CASE("maximal boxes")
{
    // 3x3 grid, membership
    //   1 1 0
    //   1 1 1
    //   0 1 1
    std::vector<bool> m{true, true, false, true, true, true, false, true, true};
    auto boxes = maximal_boxes(3, 2, m);
    CHECK(boxes.size() == 4);
    std::vector<bool> cover(9, false);
    for (const auto& b : boxes)
        for (size_t i = b[0].first; i <= b[0].second; ++i)
            for (size_t j = b[1].first; j <= b[1].second; ++j) {
                CHECK(m[i * 3 + j]);
                cover[i * 3 + j] = true;
            }
    CHECK(cover == m);
    CHECK(maximal_boxes(4, 1, {false, false, false, false}).empty());
    CHECK(maximal_boxes(4, 1, {true, true, false, true}).size() == 2);
}

TEST_CASE("level chains")
{
    const Format& f = e5m3();
    for (Fp K : {num(1), num(3, 4), num(-5, 8)}) {
        auto grid = enumerate(f, -largest(f), largest(f));
        for (size_t i = 0; i + 1 < grid.size(); i += 11) {
            Fp from = grid[i], to = grid[std::min(grid.size() - 1, i + 1 + i % 37)];
            std::vector<Fp> ws = level_chain(f, K, from, to);
            Fp s = from;
            for (Fp w : ws) s = add(f, s, mul(f, w, K));
            CHECK(s == to);
        }
        std::vector<Fp> ws = level_chain(f, K, Fp::zero(), Fp::pos_inf());
        Fp s = Fp::zero();
        for (Fp w : ws) s = add(f, s, mul(f, w, K));
        CHECK(s == Fp::pos_inf());
    }
}

TEST_CASE("iua: constants, infinities, depth")
{
    const Format& f = e5m3();
    auto kit = make_kit(f, "relu");
    Table c = Table::from_function(f, 1, num(-1), num(1), [](const std::vector<Fp>&) { return num(3, 4); });
    Network nc = synthesize_iua(*kit, c);
    for (const Box& b : sample_boxes(f, num(-1), num(1), 1, 200, 1)) CHECK(nc.eval_interval(b)[0] == Interval::point(num(3, 4)));
    Table z = Table::from_function(f, 1, num(-1), num(1), [](const std::vector<Fp>&) { return Fp::zero(); });
    Network nz = synthesize_iua(*kit, z);
    Table inf = Table::from_function(f, 1, num(-1), num(1), [&](const std::vector<Fp>& x) {
        return x[0] > num(1, 2) ? Fp::pos_inf() : x[0] < num(-1, 2) ? Fp::neg_inf() : x[0];
    });
    Network ni = synthesize_iua(*kit, inf);
    CHECK(ni.eval_interval({Interval(num(0), num(1))})[0] == Interval(Fp::zero(), Fp::pos_inf()));
    CHECK(ni.eval_interval({Interval(num(-1), num(1))})[0] == Interval(Fp::neg_inf(), Fp::pos_inf()));
    CHECK(check_iua(ni, inf, enumerate_boxes(f, num(-1), num(1), 1)).ok());
    CHECK(nz.depth() == nc.depth());
    CHECK(ni.depth() == nc.depth());
    Table wrong = Table::from_function(f, 1, num(-1, 2), num(1), [](const std::vector<Fp>&) { return Fp::zero(); });
    CHECK_THROWS(synthesize_iua(*kit, wrong));
}

TEST_CASE("iua: random d=2 table, sampled boxes")
{
    const Format& f = e5m3();
    auto kit = make_kit(f, "tanh");
    Table t = random_blocky_table(f, 2, num(-1), num(1), 3, 17);
    Network n = synthesize_iua(*kit, t);
    CHECK(check_iua(n, t, sample_boxes(f, num(-1), num(1), 2, 2000, 3)).ok());
}

}

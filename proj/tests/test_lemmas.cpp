#include "common.hpp"

#include "fpiua/lemmas.hpp"

using namespace fpiua;
using namespace fpiua::test;

TEST_SUITE("lemmas") {

TEST_CASE("inverse")
{
    const Format& f = e5m3();
    InverseResult r = find_inverse(f, num(1));
    CHECK(r.parallel == num(1));
    CHECK(r.dagger == num(15, 16));
    r = find_inverse(f, num(3, 2));
    CHECK(r.dagger == num(5, 8));
    CHECK(r.parallel == num(11, 16));
    CHECK(mul(f, num(3, 2), num(11, 16)) == num(1));
    CHECK(sweep_inverse(f).ok());
    CHECK(sweep_inverse(Format(5, 4)).ok());
}

TEST_CASE("endbit control")
{
    const Format& f = e5m3();
    for (int ez = f.emin() - f.M; ez <= f.emax() - f.M; ++ez) {
        CHECK(endbit_holds(f, num(1), ez, pow2(f, ez)));
        CHECK(endbit_holds(f, num(1), ez, endbit_control(f, num(1), ez)));
    }
    Fp g = endbit_control(f, num(9, 8), 0);
    Fp p = mul(f, g, num(9, 8));
    CHECK(p > num(1, 2));
    CHECK(p <= num(5, 4));
    CHECK(sweep_endbit(f).ok());
}

TEST_CASE("approximate sums")
{
    const Format& f = e5m3();
    CHECK(sweep_approx_sum(f, 200, 5).ok());
    CHECK(sweep_approx_sum_steps(f).ok());
}

TEST_CASE("special case and distribution law")
{
    CHECK(sweep_special_case(e5m3()).ok());
    CHECK(sweep_special_case(Format(5, 4)).ok());
    CHECK(sweep_distribution_law(e5m3(), 2000, 9).ok());
}

TEST_CASE("telescoping chains")
{
    const Format& f = e5m3();
    std::vector<Fp> alphas{num(1, 2), num(1, 4), num(-1, 8)};
    Fp x = num(3, 8), K = num(1);
    Fp want = add(f, add(f, add(f, x, num(1, 2)), num(1, 4)), num(-1, 8));
    CHECK(telescoping_chain(f, x, alphas, K) == want);
    CHECK(telescoping_chain(f, Interval::point(x), alphas, K) == Interval::point(want));
}

TEST_CASE("fan-in gadget")
{
    const Format& f = e5m3();
    Fp K = num(1), eta = num(1, 2);
    for (size_t n = 1; n <= 8; ++n) {
        auto g = fanin_gadget(f, K, eta, n);
        REQUIRE(g);
        for (size_t c = 0; c < n; ++c) CHECK(fanin_value(f, *g, c) <= eta);
        CHECK(fanin_value(f, *g, n) > eta);
        CHECK(fanin_value(f, *g, n).is_finite());
    }
}

TEST_CASE("small helpers")
{
    const Format& f = e5m3();
    CHECK(determine_theta(f, 0) == std::max(f.emin() - f.M, f.emin() - f.M + 1));
    Fp w = onebit_weight(f, num(3, 2), num(1));
    mpq_class d = abs(to_rational(f, mul(f, w, num(3, 2))) - 1);
    CHECK(d == mpq_class(1, 8));
    Fp eta = smallest(f);
    auto [y1, y2] = subnorm_inverse(f, eta, num(5, 4));
    CHECK(add(f, mul(f, y1, num(5, 4)), mul(f, y2, num(5, 4))) == eta);
}

}

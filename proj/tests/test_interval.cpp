#include "common.hpp"

#include "fpiua/activation.hpp"
#include "fpiua/interval.hpp"

using namespace fpiua;
using namespace fpiua::test;

TEST_SUITE("interval") {

TEST_CASE("operations")
{
    const Format& f = e5m3();
    Interval one = Interval::point(num(1)), e = Interval::point(num(1, 16));
    CHECK(iv_add(f, one, e) == one);
    CHECK(iv_add(f, Interval::point(Fp::zero()), Interval::top_value()).top);
    Interval inf = Interval::point(Fp::pos_inf());
    CHECK(iv_sub(f, inf, inf).top);
    CHECK(iv_mul(f, Interval(num(-1), num(2)), Interval(num(-3), num(1))) == Interval(num(-6), num(3)));
    CHECK(iv_mul(f, Interval(Fp::zero(), num(1)), inf).top);
    CHECK_THROWS(Interval(num(1), num(0)));
    CHECK_THROWS(Interval(Fp::nan(), num(0)));
}

TEST_CASE("corner rule matches the brute-force image")
{
    const Format& f = e5m3();
    auto all = enumerate(f, Fp::neg_inf(), Fp::pos_inf());
    uint64_t s = 12345;
    auto rnd = [&] {
        s = s * 6364136223846793005ULL + 1442695040888963407ULL;
        return size_t(s >> 33) % all.size();
    };
    for (int t = 0; t < 400; ++t) {
        size_t a = rnd(), b = std::min(all.size() - 1, a + rnd() % 12), c = rnd(), d = std::min(all.size() - 1, c + rnd() % 12);
        Interval I(all[a], all[b]), J(all[c], all[d]);
        for (int op = 0; op < 2; ++op) {
            Fp lo = Fp::pos_inf(), hi = Fp::neg_inf();
            bool nan = false;
            for (size_t i = a; i <= b; ++i)
                for (size_t j = c; j <= d; ++j) {
                    Fp r = op ? mul(f, all[i], all[j]) : add(f, all[i], all[j]);
                    if (r.is_nan()) nan = true;
                    else {
                        lo = fmin(lo, r);
                        hi = fmax(hi, r);
                    }
                }
            Interval got = op ? iv_mul(f, I, J) : iv_add(f, I, J);
            if (nan) CHECK(got.top);
            else CHECK(got == Interval(lo, hi));
        }
    }
}

TEST_CASE("lift")
{
    const Format& f = e5m3();
    auto relu = Activation::make(f, "relu");
    CHECK(relu->lift(Interval(num(-1), num(1))) == Interval(Fp::zero(), num(1)));
    auto id = Activation::make(f, "identity");
    CHECK(id->lift(Interval::top_value()).top);
    auto sg = Activation::make(f, "sigmoid");
    CHECK(sg->lift(Interval::point(Fp::zero())) == Interval::point(num(1, 2)));
}

TEST_CASE("lift equals the exhaustive image on every interval")
{
    const Format& f = e5m3();
    auto all = enumerate(f, Fp::neg_inf(), Fp::pos_inf());
    for (const char* name : {"relu", "gelu", "mish", "tanh"}) {
        auto act = Activation::make(f, name);
        FpFn fn = [&](Fp x) { return (*act)(x); };
        for (size_t i = 0; i < all.size(); i += 2)
            for (size_t j = i; j < all.size(); j += 3) {
                Interval I(all[i], all[j]);
                REQUIRE(act->lift(I) == iv_lift_exhaustive(f, fn, I));
            }
    }
}

TEST_CASE("affine")
{
    const Format& f = e5m3();
    Box b{Interval(num(-1), num(1)), Interval::point(num(3))};
    CHECK(iv_affine(f, {{num(1), Fp::zero()}, {Fp::zero(), num(1)}}, {Fp::zero(), Fp::zero()}, b) == b);
    CHECK(iv_affine(f, {{num(1)}}, {num(1, 16)}, {Interval::point(num(1))})[0] == Interval::point(num(1)));
    CHECK(iv_affine(f, {{num(2)}}, {Fp::zero()}, {Interval::top_value()})[0].top);
    CHECK_THROWS(iv_affine(f, {{num(1)}}, {}, b));
}

TEST_CASE("text form")
{
    const Format& f = e5m3();
    Box b{Interval(num(-1), num(1)), Interval::top_value()};
    CHECK(to_string(f, b) == "[-:0:8,+:0:8],Top");
    CHECK(parse_box(f, to_string(f, b)) == b);
    CHECK(parse_interval(f, "[+:0:8,+inf]") == Interval(num(1), Fp::pos_inf()));
}

}

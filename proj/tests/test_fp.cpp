#include "common.hpp"

using namespace fpiua;
using namespace fpiua::test;

TEST_SUITE("fp") {

TEST_CASE("derived constants")
{
    const Format& f = e5m3();
    CHECK(f.emin() == -14);
    CHECK(f.emax() == 15);
    CHECK(f.omega() == mpq_class(1, 1 << 17));
    CHECK(f.big_omega() == 61440);
    CHECK(f.eps() == mpq_class(1, 16));
    CHECK(f.overflow_c() == 2048);
    CHECK(Format::parse("E5M10").M == 10);
    CHECK_THROWS(Format::parse("E5"));
}

TEST_CASE("rounding")
{
    const Format& f = e5m3();
    CHECK(round(f, mpq_class(0)) == Fp::zero());
    CHECK(round(f, mpq_class(63488)) == Fp::pos_inf());
    CHECK(round(f, mpq_class(63487)) == largest(f));
    CHECK(round(f, mpq_class(-63488)) == Fp::neg_inf());
    CHECK(round(f, mpq_class(17, 16)) == num(1));
    CHECK(round(f, mpq_class(19, 16)) == num(5, 4)); // tie between 1.125 and 1.25 goes to the even significand
    CHECK(round(f, ExtReal::pos_inf()) == Fp::pos_inf());
}

TEST_CASE("rounding agrees with a scan over all floats")
{
    const Format& f = e5m3();
    auto all = enumerate(f, -largest(f), largest(f));
    for (int k = -300; k <= 300; ++k) {
        mpq_class x(k, 97);
        Fp best = all[0];
        mpq_class bd = abs(to_rational(f, best) - x);
        for (Fp y : all) {
            mpq_class d = abs(to_rational(f, y) - x);
            if (d < bd || (d == bd && decompose(f, y).digits.back() == 0)) {
                best = y;
                bd = d;
            }
        }
        CHECK(round(f, x) == best);
    }
}

TEST_CASE("arithmetic")
{
    const Format& f = e5m3();
    CHECK(add(f, num(1), num(1, 16)) == num(1));
    std::vector<Fp> ones(20, num(1));
    CHECK(sum_left_assoc(f, ones) == num(16));
    CHECK(sum_left_assoc(f, {}) == Fp::zero());
    CHECK(sum_left_assoc(f, {smallest(f), -smallest(f)}) == Fp::zero());
    CHECK(add(f, Fp::pos_inf(), Fp::zero()) == Fp::pos_inf());
    CHECK(sub(f, Fp::pos_inf(), Fp::zero()) == Fp::pos_inf());
    CHECK(add(f, Fp::pos_inf(), Fp::neg_inf()).is_nan());
    CHECK(mul(f, Fp::zero(), Fp::pos_inf()).is_nan());
    CHECK(mul(f, num(-2), Fp::pos_inf()) == Fp::neg_inf());
    CHECK(add(f, Fp::nan(), num(1)).is_nan());
    // not associative
    Fp e = num(1, 16);
    CHECK(add(f, add(f, num(1), e), num(-1)) != add(f, num(1), add(f, e, num(-1))));
    CHECK(add(f, num(2), num(3)) == add(f, num(3), num(2)));
}

TEST_CASE("tables agree with the exact path")
{
    const Format& f = e5m3();
    Arith a(f);
    auto all = enumerate(f, Fp::neg_inf(), Fp::pos_inf());
    for (size_t i = 0; i < all.size(); i += 3)
        for (size_t j = 0; j < all.size(); j += 5) {
            REQUIRE(a.add(all[i], all[j]) == add(f, all[i], all[j]));
            REQUIRE(a.mul(all[i], all[j]) == mul(f, all[i], all[j]));
        }
}

TEST_CASE("succ and pred")
{
    const Format& f = e5m3();
    CHECK(succ(f, num(1)) == num(9, 8));
    CHECK(succ(f, largest(f)) == Fp::pos_inf());
    CHECK(succ(f, Fp::zero()) == smallest(f));
    CHECK(to_rational(f, smallest(f)) == mpq_class(1, 1 << 17));
    CHECK(pred(f, Fp::zero()) == -smallest(f));
    CHECK_THROWS(pred(f, Fp::neg_inf()));
    CHECK_THROWS(succ(f, Fp::pos_inf()));
    CHECK_THROWS(succ(f, Fp::nan()));
}

TEST_CASE("decompose")
{
    const Format& f = e5m3();
    auto d = decompose(f, num(3, 2));
    CHECK(d.e == 0);
    CHECK(d.m == mpq_class(3, 2));
    CHECK(d.digits == std::vector<int>{1, 1, 0, 0});
    d = decompose(f, smallest(f));
    CHECK(d.e == -14);
    CHECK(d.m == mpq_class(1, 8));
    CHECK(d.digits == std::vector<int>{0, 0, 0, 1});
    d = decompose(f, Fp::zero());
    CHECK(d.e == -14);
    CHECK(d.m == 0);
    CHECK(d.digits == std::vector<int>{0, 0, 0, 0});
    CHECK_THROWS(decompose(f, Fp::pos_inf()));
}

TEST_CASE("enumerate and encoding")
{
    const Format& f = e5m3();
    CHECK(enumerate(f, num(-1), num(1)).size() == 241);
    CHECK(enumerate(f, -largest(f), largest(f)).size() == 495);
    CHECK(enumerate(f, num(1), num(1)) == std::vector<Fp>{num(1)});
    CHECK(f.finite_count() == 495);
    CHECK(encode(f, num(1)) == "+:0:8");
    CHECK(encode(f, smallest(f)) == "+:-14:1");
    CHECK(encode(f, Fp::zero()) == "+:-14:0");
    for (Fp x : enumerate(f, Fp::neg_inf(), Fp::pos_inf())) CHECK(decode(f, encode(f, x)) == x);
    CHECK(decode(f, "nan").is_nan());
    CHECK_THROWS(decode(f, "+:0:3")); // not canonical: e > emin needs m >= 2^M
    CHECK_THROWS(decode(f, "1.0"));
}

TEST_CASE("rounding error bounds")
{
    const Format& f = e5m3();
    for (int k = 1; k < 4000; k += 7) {
        mpq_class x(k * k, 1031);
        Fp r = round(f, x);
        if (!r.is_finite()) continue;
        mpq_class err = abs(to_rational(f, r) - x);
        if (expo(f, r) > f.emin() || decompose(f, r).digits[0] == 1) CHECK(err <= f.eps() * x);
        else CHECK(err <= f.omega() / 2);
    }
}

TEST_CASE("monotone rounding")
{
    const Format& f = e5m3();
    Fp prev = round(f, mpq_class(-70000));
    for (int k = -70000; k <= 70000; k += 13) {
        Fp r = round(f, mpq_class(k, 3));
        CHECK(prev <= r);
        prev = r;
    }
}

}

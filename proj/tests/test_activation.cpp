#include "common.hpp"

#include "fpiua/condition.hpp"

using namespace fpiua;
using namespace fpiua::test;

TEST_SUITE("activations") {

TEST_CASE("rounded activations")
{
    const Format& f = e5m3();
    auto relu = Activation::make(f, "relu");
    for (Fp x : enumerate(f, -largest(f), largest(f))) CHECK((*relu)(x) == (x.negative() ? Fp::zero() : x));
    auto sg = Activation::make(f, "sigmoid");
    CHECK((*sg)(Fp::neg_inf()) == Fp::zero());
    CHECK((*sg)(Fp::pos_inf()) == num(1));
    CHECK((*sg)(Fp::nan()).is_nan());
    auto gelu = Activation::make(f, "gelu");
    CHECK((*gelu)(num(1)) == num(13, 16)); // rnd(0.8413...)
    CHECK(real_activation("gelu", 1.0) == doctest::Approx(0.8413).epsilon(1e-3));
    CHECK_THROWS(Activation::make(f, "swish"));
}

TEST_CASE("correct rounding against high precision")
{
    const Format& f = e5m3();
    for (const auto& name : Activation::names()) {
        auto act = Activation::make(f, name);
        for (Fp x : enumerate(f, num(-4), num(4))) CHECK((*act)(x) == correctly_rounded(f, name, x));
    }
}

TEST_CASE("monotone activations are monotone")
{
    const Format& f = e5m3();
    for (const char* name : {"relu", "leakyrelu", "softplus", "sigmoid", "tanh", "identity"}) {
        auto act = Activation::make(f, name);
        CHECK(act->monotone());
        Fp prev = (*act)(Fp::neg_inf());
        for (Fp x : enumerate(f, -largest(f), Fp::pos_inf())) {
            Fp y = (*act)(x);
            CHECK(prev <= y);
            prev = y;
        }
    }
}

TEST_CASE("condition witnesses")
{
    const Format& f = e5m3();
    for (const auto& name : Activation::names()) {
        auto act = Activation::make(f, name);
        ConditionReport r = check_condition(*act);
        INFO(name);
        REQUIRE(r.ok);
        CHECK(verify_witness(*act, *r.witness));
        CHECK(verify_relaxed(*act, *r.witness));
    }
    auto relu = check_condition(*Activation::make(f, "relu"));
    CHECK(relu.witness->c1 == Fp::zero());
    auto id = check_condition(*Activation::make(f, "identity"));
    CHECK(id.ok);
    auto zero = Activation::custom(f, "zero", [](Fp) { return Fp::zero(); }, true);
    ConditionReport z = check_condition(*zero);
    CHECK(!z.ok);
    CHECK(z.failed == "C1");
}

TEST_CASE("condition table columns")
{
    const Format& f = e5m3();
    auto [lo, hi] = k_range(f);
    CHECK(lo == mpq_class(5, 128));
    CHECK(hi == mpq_class(9, 8));
    CHECK(lambda_cap(f) == mpq_class(64, 5));
    std::string rep = condition_table_report(f);
    CHECK(rep.find("[0.0390625, 1.125]") != std::string::npos);
    CHECK(rep.find("12.8") != std::string::npos);
    CHECK(condition_table_report(Format(8, 23)).find("-2^127") != std::string::npos);
}

}

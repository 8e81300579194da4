#include "common.hpp"

#include "fpiua/builder.hpp"
#include "fpiua/completeness.hpp"
#include "fpiua/oracle.hpp"

using namespace fpiua;
using namespace fpiua::test;

namespace {

Interval run(const std::vector<Step>& steps, Interval x)
{
    const Format& f = e5m3();
    Arith a(f);
    auto id = Activation::make(f, "identity");
    for (size_t i = 0; i < steps.size(); ++i) x = apply_step(a, *id, steps[i], x, i == 0);
    return x;
}

} // namespace

TEST_SUITE("completeness") {

TEST_CASE("f0 and g0")
{
    const Format& f = e5m3();
    Fp w = smallest(f), big = largest(f);
    auto f0 = f0_steps(f);
    Fp two = add(f, w, w), four = add(f, two, two);
    CHECK(run(f0, Interval::point(four)) == Interval::point(two));
    CHECK(run(f0, Interval::point(Fp::zero())) == Interval::point(Fp::zero()));
    CHECK(run(f0, Interval::point(w)) == Interval::point(w));
    CHECK(run(f0, Interval(-two, Fp::zero())) == Interval::point(Fp::zero()));
    CHECK(run(f0, Interval(two, four)) == Interval::point(two));
    CHECK(g0_iterations(f) == 35);
    auto g0 = g0_steps(f);
    CHECK(run(g0, Interval(-big, Fp::zero())) == Interval::point(Fp::zero()));
    CHECK(run(g0, Interval(w, big)) == Interval::point(w));
    CHECK(run(g0, Interval(-big, big)) == Interval(Fp::zero(), w));
}

TEST_CASE("identity kit thresholds over all of F")
{
    const Format& f = e5m3();
    auto kit = identity_kit(f);
    CHECK(kit->K == num(1));
    CHECK(kit->eta == num(1));
    auto all = enumerate(f, kit->a, kit->b);
    for (size_t k = 0; k < all.size(); k += 19) {
        Fp z = all[k];
        auto le = kit->phi_le(z), ge = kit->phi_ge(z);
        for (size_t i = 0; i < all.size(); i += 3)
            for (size_t j = i; j < all.size(); j += 5) {
                Interval I(all[i], all[j]);
                REQUIRE(run(le, I) == indicator_range(kit->K, I, kit->a, z));
                REQUIRE(run(ge, I) == indicator_range(kit->K, I, z, kit->b));
            }
    }
    for (size_t i = 0; i < all.size(); ++i)
        for (size_t j = i; j < all.size(); ++j) {
            Interval I(all[i], all[j]);
            REQUIRE(run(kit->psi, I) == indicator_above(*kit, I));
        }
}

TEST_CASE("programs")
{
    const Format& f = e5m3();
    Fp big = largest(f);
    Table c = Table::from_function(f, 1, -big, big, [](const std::vector<Fp>&) { return num(5); });
    Program pc = synthesize_program(c);
    CHECK(pc.code.size() == 1);
    CHECK(pc.code[0].op == Op::Const);
    Table t = random_table(f, 1, -big, big, 3);
    Program p = synthesize_program(t);
    for (const Instr& in : p.code) CHECK((in.op == Op::Const || in.op == Op::Add || in.op == Op::Mul));
    CHECK(check_program_pointwise(p, t).ok());
    CHECK(check_program(p, t, sample_boxes(f, -big, big, 1, 500, 8)).ok());
    Table small = random_table(f, 1, num(-1), num(1), 3);
    CHECK_THROWS(synthesize_program(small));
    Table three(f, 3, -big, big);
    CHECK_THROWS(synthesize_program(three));
}

}

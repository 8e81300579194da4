#include "common.hpp"

#include "fpiua/io.hpp"
#include "fpiua/oracle.hpp"
#include "fpiua/program.hpp"

using namespace fpiua;
using namespace fpiua::test;

TEST_SUITE("network") {

TEST_CASE("evaluation")
{
    const Format& f = e5m3();
    Network id = identity_network(f, 2);
    std::vector<Fp> x{num(3), num(-1, 4)};
    CHECK(id.eval(x) == x);
    Network one(f, "relu", 1);
    one.layers.push_back(Network::dense_layer({{num(3)}}, {num(1, 2)}));
    CHECK(one.eval({num(2)})[0] == add(f, mul(f, num(2), num(3)), num(1, 2)));
    CHECK(one.depth() == 1);
    CHECK_THROWS(one.eval({num(1), num(2)}));
}

TEST_CASE("min network rounding")
{
    const Format& f = e5m3();
    Network mu = relu_min_network(f);
    // 1 (-) eps/2 ties back to 1, so every ReLU pair cancels
    CHECK(mu.eval({num(1), num(1, 32)})[0] == Fp::zero());
    // 1 - eps is a float, so half of it survives
    CHECK(mu.eval({num(1), num(1, 16)})[0] == num(1, 32));
    CHECK(mu.eval({num(1, 2), num(1, 4)})[0] == num(1, 4));
}

TEST_CASE("implicit zero columns keep the dense semantics")
{
    const Format& f = e5m3();
    Network n(f, "identity", 2);
    n.layers.push_back(Network::dense_layer({{num(1), Fp::zero()}}, {Fp::zero()}));
    CHECK(n.eval({num(1), Fp::pos_inf()})[0].is_nan());
    CHECK(n.eval_interval({Interval::point(num(1)), Interval(num(1), Fp::pos_inf())})[0].top);
    CHECK(n.eval({num(1), num(5)})[0] == num(1));
    CHECK(naive_eval(n, {num(1), Fp::pos_inf()})[0].is_nan());
}

TEST_CASE("singletons stay singletons")
{
    const Format& f = e5m3();
    for (uint64_t s = 0; s < 10; ++s) {
        Network n = random_network(f, "tanh", 2, 3, 4, s);
        for (Fp x : enumerate(f, num(-1), num(1))) {
            std::vector<Fp> p{x, num(1, 4)};
            Fp y = n.eval(p)[0];
            Interval I = n.eval_interval({Interval::point(x), Interval::point(num(1, 4))})[0];
            if (y.is_nan()) CHECK(I.top);
            else CHECK(I == Interval::point(y));
            CHECK(naive_eval(n, p)[0].c == y.c);
        }
    }
}

TEST_CASE("soundness exhaustive over d=1 boxes")
{
    const Format& f = e5m3();
    Network n = random_network(f, "gelu", 1, 3, 5, 42);
    auto boxes = enumerate_boxes(f, num(-1), num(1), 1);
    CHECK(boxes.size() == 29161);
    OracleReport r = check_soundness(n, boxes);
    CHECK(r.ok());
}

TEST_CASE("composition")
{
    const Format& f = e5m3();
    Network inner(f, "relu", 1);
    inner.layers.push_back(Network::dense_layer({{num(2)}, {num(-1)}}, {num(1, 4), Fp::zero()}));
    inner.no_last_affine = true;
    Network outer(f, "relu", 2);
    outer.layers.push_back(Network::dense_layer({{num(1, 2), num(3)}}, {num(-1)}));
    Network c = compose(outer, inner);
    CHECK(c.depth() == inner.depth() + outer.depth() - 1);
    for (Fp x : enumerate(f, num(-1), num(1))) CHECK(c.eval({x}) == outer.eval(inner.eval({x})));
    // identity on the outside
    Network id = identity_network(f, 2, "relu");
    Network c2 = compose(id, inner);
    for (Fp x : enumerate(f, num(-1), num(1))) CHECK(c2.eval({x}) == inner.eval({x}));
    // merging into a no_first_affine network
    Network plain(f, "relu", 1);
    plain.layers.push_back(Network::dense_layer({{num(3)}}, {num(-1, 2)}));
    Network nf(f, "relu", 1);
    nf.no_first_affine = true;
    nf.layers.push_back(Network::dense_layer({{num(1)}, {Fp::zero()}}, {Fp::zero(), num(1, 8)}));
    nf.layers.push_back(Network::dense_layer({{num(1), num(2)}}, {Fp::zero()}));
    nf.validate();
    Network m = compose(nf, plain);
    CHECK(m.depth() == plain.depth() + nf.depth() - 1);
    for (Fp x : enumerate(f, num(-1), num(1))) CHECK(m.eval({x}) == nf.eval(plain.eval({x})));
    CHECK_THROWS(compose(plain, plain));
}

TEST_CASE("validation")
{
    const Format& f = e5m3();
    Network n(f, "relu", 1);
    n.layers.push_back(Network::dense_layer({{Fp::pos_inf()}}, {Fp::zero()}));
    CHECK_THROWS(n.validate());
    Network nf(f, "relu", 1);
    nf.no_first_affine = true;
    nf.layers.push_back(Network::dense_layer({{num(2)}}, {Fp::zero()}));
    CHECK_THROWS(nf.validate());
}

}

TEST_SUITE("program") {

TEST_CASE("compilation")
{
    const Format& f = e5m3();
    Network n(f, "identity", 1);
    n.layers.push_back(Network::dense_layer({{num(3)}}, {num(1, 2)}));
    Program p = compile_to_program(n);
    // a constant pool plus [Mul, Add]
    size_t muls = 0, adds = 0;
    for (const Instr& in : p.code) {
        muls += in.op == Op::Mul;
        adds += in.op == Op::Add;
    }
    CHECK(muls == 1);
    CHECK(adds == 1);
    CHECK_THROWS(compile_to_program(relu_min_network(f)));
}

TEST_CASE("programs equal their networks")
{
    const Format& f = e5m3();
    for (uint64_t s = 0; s < 5; ++s) {
        Network n = random_network(f, "identity", 1, 3, 4, s);
        Program p = compile_to_program(n);
        for (Fp x : enumerate(f, Fp::neg_inf(), Fp::pos_inf())) CHECK(run_program(p, {x})[0].c == n.eval({x})[0].c);
        for (const Box& b : sample_boxes(f, Fp::neg_inf(), Fp::pos_inf(), 1, 300, s)) {
            Interval a = run_program_interval(p, b)[0], c = n.eval_interval(b)[0];
            CHECK(a == c);
        }
    }
}

TEST_CASE("validation")
{
    Program p;
    p.fmt = e5m3();
    p.arity = 1;
    p.code.push_back(Instr{Op::Add, 0, 1, {}});
    CHECK_THROWS(p.validate());
}

}

TEST_SUITE("io") {

TEST_CASE("round trips")
{
    const Format& f = e5m3();
    Network n = random_network(f, "sigmoid", 2, 3, 5, 7);
    n.no_last_affine = true;
    Network m = network_from_text(network_to_text(n));
    CHECK(network_to_text(m) == network_to_text(n));
    for (Fp x : enumerate(f, num(-1), num(1))) CHECK(m.eval({x, x}) == n.eval({x, x}));
    Program p = compile_to_program(random_network(f, "identity", 1, 2, 3, 1));
    CHECK(program_to_text(program_from_text(program_to_text(p))) == program_to_text(p));
    Table t = random_table(f, 2, num(-1, 4), num(1, 4), 3);
    Table u = table_from_text(table_to_text(t));
    CHECK(u.values == t.values);
    CHECK(u.grid == t.grid);
    CHECK_THROWS(network_from_text("fpnn 9\n"));
}

}

#include "fpiua/completeness.hpp"

#include "fpiua/synth.hpp"

namespace fpiua {

namespace {

int ceil_log2(long v)
{
    int k = 0;
    while ((long(1) << k) < v) ++k;
    return k;
}

Interval run_steps(const Format& f, const std::vector<Step>& steps, Interval x)
{
    Arith ar(f);
    auto id = Activation::make(f, "identity");
    for (size_t i = 0; i < steps.size(); ++i) x = apply_step(ar, *id, steps[i], x, i == 0);
    return x;
}

} // namespace

std::vector<Step> f0_steps(const Format& f)
{
    return {Step{from_int(f, 1), {}, smallest(f)}, Step{pow2(f, -1), {}, Fp::zero()}};
}

size_t g0_iterations(const Format& f)
{
    long top = long(1) << (f.M + 2);
    int m1 = ceil_log2(top - 4), m2 = ceil_log2(top - 2);
    return size_t(f.emax() - f.emin() + std::max(m1, m2) + 1);
}

std::vector<Step> g0_steps(const Format& f)
{
    std::vector<Step> s;
    auto one = f0_steps(f);
    for (size_t i = 0; i < g0_iterations(f); ++i) s.insert(s.end(), one.begin(), one.end());
    // 2 omega is a fixed point of f0 under ties-to-even, so positives end in
    // {omega, 2 omega}; 2^-1 (*) (x (+) 2 omega) (+) (-omega) maps both to omega and 0 to 0
    Fp omega = smallest(f);
    s.push_back(Step{from_int(f, 1), {}, add(f, omega, omega)});
    s.push_back(Step{pow2(f, -1), {}, -omega});
    return s;
}

std::vector<Step> identity_iota_above(const Format& f, Fp z, bool negate)
{
    if (!z.is_finite()) throw Error("identity_iota_above: non-finite threshold");
    Fp one = from_int(f, 1);
    std::vector<Step> s;
    // shift so the threshold sits at 0; halve first when x - z could overflow
    bool big = z >= pow2(f, f.emax() - f.M - 1) || z <= -pow2(f, f.emax() - f.M - 1);
    if (!big) s.push_back(Step{negate ? -one : one, {}, -z});
    else s.push_back(Step{negate ? -pow2(f, -1) : pow2(f, -1), {}, -mul(f, z, pow2(f, -1))});
    auto g0 = g0_steps(f);
    s.insert(s.end(), g0.begin(), g0.end());
    // omega -> 2^emin -> 1
    s.push_back(Step{pow2(f, f.M), {}, Fp::zero()});
    s.push_back(Step{pow2(f, -f.emin()), {}, Fp::zero()});
    return s;
}

std::shared_ptr<SeparabilityKit> identity_kit(const Format& f)
{
    auto kit = std::make_shared<SeparabilityKit>();
    kit->fmt = f;
    kit->act = Activation::make(f, "identity");
    Fp one = from_int(f, 1);
    kit->K = one;
    kit->eta = one;
    kit->eta_plus = succ(f, one);
    kit->a = -largest(f);
    kit->b = largest(f);
    kit->psi = identity_iota_above(f, one);
    size_t len = kit->psi.size();
    kit->phi_len = len;
    // constant 1 for the thresholds that every finite float passes
    std::vector<Step> always(len, Step{one, {}, Fp::zero()});
    always[0] = Step{Fp::zero(), {}, one};
    Fp lo = kit->a, hi = kit->b;
    kit->phi_ge = [f, lo, always](Fp z) { return z == lo ? always : identity_iota_above(f, pred(f, z)); };
    kit->phi_le = [f, hi, always](Fp z) { return z == hi ? always : identity_iota_above(f, pred(f, -z), true); };

    Fp omega = smallest(f), big = largest(f);
    auto g0 = g0_steps(f);
    if (run_steps(f, g0, Interval(-big, Fp::zero())) != Interval::point(Fp::zero()) ||
        run_steps(f, g0, Interval(omega, big)) != Interval::point(omega) ||
        run_steps(f, g0, Interval(-big, big)) != Interval(Fp::zero(), omega))
        throw Error("identity kit: g0 postcondition failed");
    for (Interval I : {Interval(-big, one), Interval(kit->eta_plus, big), Interval(-big, big), Interval::point(one)})
        if (run_steps(f, kit->psi, I) != indicator_above(*kit, I)) throw Error("identity kit: psi postcondition failed");
    for (Fp z : {lo, Fp::zero(), one, hi}) {
        Interval dom(lo, hi);
        if (run_steps(f, kit->phi_le(z), dom) != indicator_range(one, dom, lo, z) ||
            run_steps(f, kit->phi_ge(z), dom) != indicator_range(one, dom, z, hi))
            throw Error("identity kit: phi postcondition failed");
    }
    return kit;
}

Program synthesize_program(const Table& target, size_t max_dim)
{
    const Format& f = target.fmt;
    if (target.dim > max_dim) throw Error("synthesize_program: dimension above the configured cap");
    if (target.lo != -largest(f) || target.hi != largest(f)) throw Error("synthesize_program: the table must cover all finite floats");
    Fp first = target.values.at(0);
    bool constant = true;
    for (Fp v : target.values) constant = constant && v == first;
    if (constant) {
        Program p;
        p.fmt = f;
        p.arity = target.dim;
        p.code.push_back(Instr{Op::Const, 0, 0, first});
        p.outputs.push_back(uint32_t(p.arity));
        return p;
    }
    auto kit = identity_kit(f);
    Network n = synthesize_iua(*kit, target);
    Program p = compile_to_program(n, Box(target.dim, Interval(kit->a, kit->b)));
    for (size_t k = 0; k < target.points(); ++k)
        if (run_program(p, target.point(k))[0] != target.values[k]) throw Error("synthesize_program: pointwise check failed");
    return p;
}

} // namespace fpiua

#include "fpiua/lemmas.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>

namespace fpiua {

namespace {

mpq_class q2(int k)
{
    mpq_class r(1);
    if (k >= 0) mpz_mul_2exp(r.get_num_mpz_t(), r.get_num_mpz_t(), unsigned(k));
    else mpz_mul_2exp(r.get_den_mpz_t(), r.get_den_mpz_t(), unsigned(-k));
    r.canonicalize();
    return r;
}

mpq_class rat(const Format& f, Fp x) { return to_rational(f, x); }

void fail(SweepResult& r, const std::string& what)
{
    if (r.failures++ == 0) r.first_failure = what;
}

std::vector<Fp> all_finite(const Format& f) { return enumerate(f, Fp(-f.max_ord()), Fp(f.max_ord())); }

} // namespace

InverseResult find_inverse(const Format& f, Fp m)
{
    Fp one = from_int(f, 1), two = from_int(f, 2), half = pow2(f, -1);
    if (!m.is_finite() || m < one || m >= two) throw Error("find_inverse: m must lie in [1,2)");
    Fp one_minus = pred(f, one);
    InverseResult r;
    for (Fp y = half; y <= one; y = succ(f, y)) {
        Fp p = mul(f, m, y);
        if (!r.parallel && y > half && p == one) r.parallel = y;
        if (!r.dagger && y < one && p == one_minus && rat(f, m) * rat(f, y) == rat(f, one_minus)) r.dagger = y;
    }
    if (!r.parallel && !r.dagger) throw Error("find_inverse: no inverse found for " + encode(f, m));
    return r;
}

bool endbit_k_valid(const Format& f, Fp K)
{
    if (!K.is_finite()) return false;
    mpq_class a = abs(rat(f, K));
    mpq_class lo = (1 + q2(-f.M + 1)) * q2(-f.M - 2);
    mpq_class hi = 1 + q2(-2) - q2(-f.M);
    return lo <= a && a <= hi;
}

bool endbit_holds(const Format& f, Fp K, int e_zeta, Fp gamma)
{
    Fp p = mul(f, gamma, K);
    if (!p.is_finite()) return false;
    mpq_class v = rat(f, p);
    return q2(e_zeta - 1) < v && v <= mpq_class(5, 4) * q2(e_zeta);
}

Fp endbit_control(const Format& f, Fp K, int e_zeta)
{
    if (!endbit_k_valid(f, K)) throw Error("endbit_control: K outside the admissible range");
    if (e_zeta < f.emin() - f.M || e_zeta > f.emax() - f.M) throw Error("endbit_control: e_zeta out of range");
    for (int64_t c = 1; c <= f.max_ord(); ++c) {
        Fp g(K.negative() ? -c : c);
        if (endbit_holds(f, K, e_zeta, g)) return g;
    }
    throw Error("endbit_control: no gamma found");
}

std::pair<Fp, Fp> subnorm_inverse(const Format& f, Fp eta, Fp x)
{
    if (!eta.is_finite() || !x.is_finite() || x.is_zero()) throw Error("subnorm_inverse: bad arguments");
    if (eta.is_zero()) return {Fp::zero(), Fp::zero()};
    auto check = [&](Fp y1, Fp y2) { return add(f, mul(f, y1, x), mul(f, y2, x)) == eta; };
    // fold signs into the weights: the construction is stated for eta, x > 0
    bool flip = eta.negative() != x.negative();
    auto sgn = [&](Fp y) { return flip ? -y : y; };
    Fp ax = x.negative() ? -x : x, ae = eta.negative() ? -eta : eta;
    int ex = expo(f, ax);
    mpq_class unit = q2(f.emin() - f.M);
    mpq_class ne_q = rat(f, ae) / unit;
    bool constructed = ne_q.get_den() == 1 && ne_q < q2(f.M + 1) && rat(f, ax) >= q2(f.emin());
    if (constructed) {
        long ne = ne_q.get_num().get_si();
        Decomposed d = decompose(f, ax);
        Fp ystar;
        if (rat(f, ax) < 1) ystar = pow2(f, (d.m == 1 ? -1 : 0) - f.M + f.emin() - ex);
        else ystar = pow2(f, -f.M + f.emin());
        if (ne == 1) {
            if (check(sgn(ystar), Fp::zero())) return {sgn(ystar), Fp::zero()};
        } else {
            mpq_class nx_q = rat(f, ax) * q2(f.M - ex);
            long nx = nx_q.get_num().get_si();
            long num = (1L << f.M) * ne;
            long m = num / nx, r = num % nx;
            long h = 1L << (f.M - 1);
            long ny1 = m;
            Fp y2 = Fp::zero();
            if (r < h || (r == h && ne % 2 == 0)) {
            } else if ((h < r && r < 3 * h) || ((r == h || r == 3 * h) && ne % 2 == 1)) {
                y2 = ystar;
            } else {
                ny1 = m + 1;
            }
            Fp y1 = round(f, mpq_class(ny1) * q2(-f.M + f.emin() - ex));
            if (check(sgn(y1), sgn(y2))) return {sgn(y1), sgn(y2)};
        }
    }
    // exhaustive fallback over the achievable products
    std::map<int64_t, Fp> prod;
    for (Fp y : all_finite(f)) prod.emplace(mul(f, y, x).c, y);
    for (auto& [p1, y1] : prod)
        for (auto& [p2, y2] : prod)
            if (add(f, Fp(p1), Fp(p2)) == eta) return {y1, y2};
    throw Error("subnorm_inverse: no weights found");
}

Fp telescoping_chain(const Format& f, Fp x, const std::vector<Fp>& alphas, Fp K)
{
    Fp acc = x;
    for (Fp a : alphas) acc = add(f, acc, mul(f, a, K));
    return acc;
}

Interval telescoping_chain(const Format& f, const Interval& x, const std::vector<Fp>& alphas, Fp K)
{
    Arith ar(f);
    Interval acc = x;
    for (Fp a : alphas) acc = iv_add(ar, acc, Interval::point(mul(f, a, K)));
    return acc;
}

Fp onebit_weight(const Format& f, Fp x, Fp c)
{
    if (!x.is_finite() || !c.is_finite() || c.is_zero()) throw Error("onebit_weight: bad arguments");
    mpq_class ulp = q2(-f.M + expo(f, c));
    mpq_class cq = rat(f, c);
    for (Fp w : all_finite(f)) {
        Fp p = mul(f, w, x);
        if (!p.is_finite()) continue;
        mpq_class v = rat(f, p);
        if (v == cq + ulp || v == cq - ulp) return w;
    }
    throw Error("onebit_weight: no weight found");
}

std::array<Fp, 3> residue_deltas(const Format& f, Fp y, bool up)
{
    if (!y.is_finite() || y.is_zero()) throw Error("residue_deltas: y must be finite and nonzero");
    bool neg = y.negative();
    Fp ay = neg ? -y : y;
    int ey = expo(f, ay);
    if (ey < f.emin() + 1) throw Error("residue_deltas: y too small");
    bool u = up != neg;
    Fp h = pow2(f, -1 - f.M + ey), full = pow2(f, -f.M + ey);
    bool odd = decompose(f, ay).digits.back() == 1;
    std::array<Fp, 3> a;
    if (!odd) a = u ? std::array<Fp, 3>{-h, -h, full} : std::array<Fp, 3>{h, h, -full};
    else a = u ? std::array<Fp, 3>{full, -h, -h} : std::array<Fp, 3>{-full, h, h};
    if (neg)
        for (auto& v : a) v = -v;
    return a;
}

int determine_theta(const Format& f, int e0) { return std::max(f.emin() - f.M, -e0 + f.emin() - f.M + 1); }

Fp fanin_value(const Format& f, const FanIn& g, size_t count)
{
    Fp s = Fp::zero();
    for (size_t i = 0; i < count; ++i) s = add(f, s, g.term);
    return add(f, s, g.beta);
}

std::optional<FanIn> fanin_gadget(const Format& f, Fp K, Fp eta, size_t n)
{
    if (n == 0 || !eta.is_finite()) throw Error("fanin_gadget: bad arguments");
    Fp eta_p = succ(f, eta);
    std::set<int64_t> tried;
    // smaller terms first keeps sums far from overflow
    std::vector<std::pair<Fp, Fp>> cands;
    for (Fp a : all_finite(f)) {
        Fp t = mul(f, a, K);
        if (!t.is_finite() || t <= Fp::zero() || !tried.insert(t.c).second) continue;
        cands.push_back({t, a});
    }
    std::sort(cands.begin(), cands.end(), [](auto x, auto y) { return x.first < y.first; });
    for (auto [t, a] : cands) {
        Fp lo = Fp::zero(), hi = Fp::zero();
        bool finite = true;
        for (size_t i = 0; i < n; ++i) {
            lo = hi;
            hi = add(f, hi, t);
            if (!hi.is_finite()) finite = false;
        }
        if (!finite || !(lo < hi)) continue;
        // largest beta with lo (+) beta <= eta, by bisection on codes (monotone in beta)
        int64_t l = -f.max_ord(), r = f.max_ord();
        if (add(f, lo, Fp(l)) > eta) continue;
        while (l < r) {
            int64_t mid = l + (r - l + 1) / 2;
            if (add(f, lo, Fp(mid)) <= eta) l = mid;
            else r = mid - 1;
        }
        Fp beta(l);
        Fp top = add(f, hi, beta);
        if (top.is_finite() && top >= eta_p) return FanIn{a, beta, t};
    }
    return std::nullopt;
}

SweepResult sweep_inverse(const Format& f)
{
    SweepResult r;
    Fp one = from_int(f, 1), two = from_int(f, 2);
    for (Fp m = one; m < two; m = succ(f, m)) {
        ++r.checked;
        try {
            auto inv = find_inverse(f, m);
            bool ok = true;
            if (inv.parallel) ok = ok && mul(f, m, *inv.parallel) == one;
            if (inv.dagger) ok = ok && rat(f, m) * rat(f, *inv.dagger) == 1 - q2(-f.M - 1);
            if (!ok) fail(r, "m=" + encode(f, m));
        } catch (const Error& e) {
            fail(r, e.what());
        }
    }
    return r;
}

SweepResult sweep_endbit(const Format& f)
{
    SweepResult r;
    for (Fp K : all_finite(f)) {
        if (!endbit_k_valid(f, K)) continue;
        for (int ez = f.emin() - f.M; ez <= f.emax() - f.M; ++ez) {
            ++r.checked;
            try {
                Fp g = endbit_control(f, K, ez);
                if (!endbit_holds(f, K, ez, g)) fail(r, "K=" + encode(f, K) + " ez=" + std::to_string(ez));
            } catch (const Error& e) {
                fail(r, "K=" + encode(f, K) + " ez=" + std::to_string(ez) + ": " + e.what());
            }
        }
    }
    return r;
}

namespace {

// nonnegative floats then +inf, with the admissible step sets
struct SumLadder {
    std::vector<Fp> z;
    std::vector<std::vector<Fp>> steps; // steps[j] admissible x_j, j >= 1
};

SumLadder ladder(const Format& f)
{
    SumLadder L;
    for (int64_t c = 0; c <= f.max_ord(); ++c) L.z.push_back(Fp(c));
    L.z.push_back(Fp::pos_inf());
    auto pos = enumerate(f, Fp(1), Fp(f.max_ord()));
    L.steps.resize(L.z.size());
    for (size_t j = 1; j < L.z.size(); ++j) {
        if (L.z[j].is_inf()) {
            // the difference is infinite: every finite x that carries Omega to +inf
            for (Fp x : pos)
                if (add(f, Fp(f.max_ord()), x).is_inf()) L.steps[j].push_back(x);
            continue;
        }
        mpq_class d = rat(f, L.z[j]) - rat(f, L.z[j - 1]);
        for (Fp x : pos) {
            mpq_class v = rat(f, x);
            if (d / 2 < v && v < d * 3 / 2) L.steps[j].push_back(x);
        }
    }
    return L;
}

} // namespace

SweepResult sweep_approx_sum(const Format& f, size_t trials, uint64_t seed)
{
    SweepResult r;
    SumLadder L = ladder(f);
    std::mt19937_64 rng(seed);
    for (size_t t = 0; t < trials; ++t) {
        ++r.checked;
        Fp acc = Fp::zero();
        for (size_t j = 1; j < L.z.size(); ++j) {
            const auto& s = L.steps[j];
            if (s.empty()) {
                fail(r, "no admissible step at j=" + std::to_string(j));
                break;
            }
            acc = add(f, acc, s[std::uniform_int_distribution<size_t>(0, s.size() - 1)(rng)]);
            if (acc != L.z[j]) {
                fail(r, "trial " + std::to_string(t) + " j=" + std::to_string(j));
                break;
            }
        }
    }
    return r;
}

SweepResult sweep_approx_sum_steps(const Format& f)
{
    SweepResult r;
    SumLadder L = ladder(f);
    for (size_t j = 1; j < L.z.size(); ++j)
        for (Fp x : L.steps[j]) {
            ++r.checked;
            if (add(f, L.z[j - 1], x) != L.z[j]) fail(r, "j=" + std::to_string(j) + " x=" + encode(f, x));
        }
    return r;
}

SweepResult sweep_special_case(const Format& f)
{
    SweepResult r;
    Fp one = from_int(f, 1), two = from_int(f, 2);
    Fp w = succ(f, one); // 1 + 2^-M
    mpq_class mid = mpq_class(3, 2), last = 2 - q2(-f.M);
    for (Fp x = one; x < two; x = succ(f, x)) {
        ++r.checked;
        mpq_class v = rat(f, x);
        // the last float 2-2^-M lies in both stated ranges; its own clause wins
        Fp want = (v < mid || v == last) ? succ(f, x) : succ(f, succ(f, x));
        if (mul(f, w, x) != want) fail(r, "x=" + encode(f, x));
    }
    return r;
}

SweepResult sweep_distribution_law(const Format& f, size_t triples, uint64_t seed)
{
    SweepResult r;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int64_t> code(-f.max_ord(), f.max_ord());
    mpq_class normal_min = q2(f.emin());
    auto normal = [&](Fp x) { return x.is_finite() && abs(rat(f, x)) >= normal_min; };
    size_t guard = 0;
    while (r.checked < triples && guard++ < triples * 1000) {
        Fp a(code(rng)), b(code(rng)), c(code(rng));
        if (!normal(a) || !normal(b) || !normal(c)) continue;
        Fp s = add(f, b, c), ab = mul(f, a, b), ac = mul(f, a, c), lhs = mul(f, a, s);
        // the relative-error argument needs every rounded intermediate normal (or an exact zero)
        auto ok_mid = [&](Fp x) { return x.is_zero() || normal(x); };
        if (!ok_mid(s) || !ok_mid(ab) || !ok_mid(ac) || !ok_mid(lhs)) continue;
        ++r.checked;
        mpq_class qa = rat(f, a), qb = rat(f, b), qc = rat(f, c);
        mpq_class diff = abs(rat(f, lhs) - (rat(f, ab) + rat(f, ac)));
        mpq_class bound = abs(qa) * ((2 + q2(-f.M - 1)) * abs(qb + qc) + abs(qb) + abs(qc)) * q2(-f.M - 1);
        if (diff > bound) fail(r, "a=" + encode(f, a) + " b=" + encode(f, b) + " c=" + encode(f, c));
    }
    return r;
}

} // namespace fpiua

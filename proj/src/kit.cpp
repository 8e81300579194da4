#include "fpiua/kit.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <set>
#include <unordered_set>

namespace fpiua {

namespace {

Interval hull(Fp x, Fp y) { return Interval(fmin(x, y), fmax(x, y)); }

// achievable constant terms t = alpha (*) sigma(z), one (z, alpha) per value
struct Catalog {
    std::vector<Fp> values; // sorted
    std::unordered_map<int64_t, std::pair<Fp, Fp>> how;
};

Catalog catalog(const Activation& act, const Witness& w)
{
    const Format& f = act.fmt();
    Arith ar(f);
    std::vector<Fp> zs{w.c2};
    std::set<std::pair<bool, int>> seen;
    Fp k = act(w.c2);
    seen.insert({k.negative(), expo(f, k)});
    for (int64_t i = 1; i <= f.max_ord(); ++i)
        for (int64_t c : {i, -i}) {
            Fp v = act(Fp(c));
            if (!v.is_finite() || v.is_zero()) continue;
            if (seen.insert({v.negative(), expo(f, v)}).second) zs.push_back(Fp(c));
        }
    Catalog cat;
    for (Fp z : zs) {
        Fp s = act(z);
        for (int64_t c = -f.max_ord(); c <= f.max_ord(); ++c) {
            Fp t = ar.mul(Fp(c), s);
            if (!t.is_finite() || t.is_zero()) continue;
            cat.how.emplace(t.c, std::make_pair(z, Fp(c)));
        }
    }
    for (auto& [t, _] : cat.how) cat.values.push_back(Fp(t));
    std::sort(cat.values.begin(), cat.values.end());
    return cat;
}

// finite b with p (+) b == target, as a code range (empty when lo > hi)
std::pair<int64_t, int64_t> bias_range(const Arith& ar, Fp p, Fp target)
{
    int64_t M = ar.fmt().max_ord();
    auto first_ge = [&](Fp t) {
        int64_t l = -M, r = M + 1;
        while (l < r) {
            int64_t m = l + (r - l) / 2;
            if (ar.add(p, Fp(m)) >= t) r = m;
            else l = m + 1;
        }
        return l;
    };
    auto last_le = [&](Fp t) {
        int64_t l = -M - 1, r = M;
        while (l < r) {
            int64_t m = l + (r - l + 1) / 2;
            if (ar.add(p, Fp(m)) <= t) l = m;
            else r = m - 1;
        }
        return l;
    };
    return {first_ge(target), last_le(target)};
}

struct Chain {
    std::vector<Fp> ts;
    int64_t b_lo, b_hi;
};

// Shortest chains of catalog constants carrying (p0, q0) to a pair from which a
// single bias lands on (t1, t2) exactly.
std::vector<Chain> pair_search(const Arith& ar, const Catalog& cat, Fp p0, Fp q0, Fp t1, Fp t2, int max_depth,
                               size_t max_solutions)
{
    std::vector<Chain> out;
    bool up = t1 < t2;
    auto live = [&](Fp p, Fp q) { return p.is_finite() && q.is_finite() && (up ? p < q : q < p); };
    if (!live(p0, q0)) return out;
    struct Node {
        Fp p, q;
        int parent;
        Fp t;
    };
    std::vector<Node> nodes{{p0, q0, -1, Fp::zero()}};
    std::unordered_set<uint64_t> seen;
    auto key = [](Fp p, Fp q) { return (uint64_t(uint32_t(int32_t(p.c))) << 32) | uint32_t(int32_t(q.c)); };
    seen.insert(key(p0, q0));
    size_t begin = 0;
    for (int depth = 0; depth <= max_depth; ++depth) {
        size_t end = nodes.size();
        for (size_t i = begin; i < end; ++i) {
            auto r1 = bias_range(ar, nodes[i].p, t1);
            auto r2 = bias_range(ar, nodes[i].q, t2);
            int64_t lo = std::max(r1.first, r2.first), hi = std::min(r1.second, r2.second);
            if (lo > hi) continue;
            Chain c{{}, lo, hi};
            for (int j = int(i); nodes[size_t(j)].parent >= 0; j = nodes[size_t(j)].parent) c.ts.push_back(nodes[size_t(j)].t);
            std::reverse(c.ts.begin(), c.ts.end());
            out.push_back(c);
            if (out.size() >= max_solutions) return out;
        }
        if (!out.empty() || depth == max_depth) break;
        for (size_t i = begin; i < end; ++i) {
            for (Fp t : cat.values) {
                Fp p = ar.add(nodes[i].p, t), q = ar.add(nodes[i].q, t);
                if (!live(p, q) || !seen.insert(key(p, q)).second) continue;
                nodes.push_back({p, q, int(i), t});
            }
        }
        begin = end;
    }
    return out;
}

Step make_step(const Catalog& cat, Fp w, const std::vector<Fp>& ts, Fp b)
{
    Step s{w, {}, b};
    for (Fp t : ts) {
        auto [z, alpha] = cat.how.at(t.c);
        s.consts.push_back({z, alpha});
    }
    return s;
}

// iterations until the three contraction intervals settle, 0 if they do not
size_t settle(const Arith& ar, const Activation& act, const Step& s, Fp eta, Fp eta_p, size_t cap)
{
    Fp big = largest(act.fmt());
    Interval i1(-big, eta), i2(eta_p, big), i3(-big, big);
    Interval g1 = Interval::point(eta), g2 = Interval::point(eta_p), g3(eta, eta_p);
    for (size_t n = 1; n <= cap; ++n) {
        i1 = apply_step(ar, act, s, i1);
        i2 = apply_step(ar, act, s, i2);
        i3 = apply_step(ar, act, s, i3);
        if (i1.top || i2.top || i3.top) return 0;
        if (i1 == g1 && i2 == g2 && i3 == g3) return n;
    }
    return 0;
}

Step build_tau(const Arith& ar, const Activation& act, const Catalog& cat, Fp eta, Fp eta_p, Fp t1, Fp t2)
{
    const Format& f = act.fmt();
    Fp s1 = act(eta), s2 = act(eta_p);
    mpq_class gap = abs(to_rational(f, t2) - to_rational(f, t1));
    std::vector<std::pair<double, Fp>> ws;
    for (int64_t c = -f.max_ord(); c <= f.max_ord(); ++c) {
        Fp w(c);
        Fp p = ar.mul(w, s1), q = ar.mul(w, s2);
        if (!p.is_finite() || !q.is_finite() || p == q) continue;
        if ((p < q) != (t1 < t2)) continue;
        mpq_class d = abs(to_rational(f, q) - to_rational(f, p));
        ws.push_back({std::fabs(std::log2(d.get_d() / gap.get_d())), w});
    }
    std::stable_sort(ws.begin(), ws.end(), [](auto x, auto y) { return x.first < y.first; });
    for (size_t i = 0; i < ws.size() && i < 256; ++i) {
        Fp w = ws[i].second;
        auto sols = pair_search(ar, cat, ar.mul(w, s1), ar.mul(w, s2), t1, t2, 3, 1);
        if (sols.empty()) continue;
        const Chain& c = sols[0];
        Step st = make_step(cat, w, c.ts, Fp(c.b_lo + (c.b_hi - c.b_lo) / 2));
        if (apply_step(ar, act, st, eta) == t1 && apply_step(ar, act, st, eta_p) == t2) return st;
    }
    throw Error("tau: no weights found for " + act.name());
}

} // namespace

ContractionParts build_contraction(const Activation& act, const Witness& w)
{
    const Format& f = act.fmt();
    Arith ar(f);
    Catalog cat = catalog(act, w);
    Fp s1 = act(w.eta), s2 = act(w.eta_plus);
    if (s1 == s2) throw Error("contraction: sigma(eta) == sigma(eta+)");
    std::vector<int> exps{w.e_theta};
    for (int d = 1; d <= 8; ++d) {
        exps.push_back(w.e_theta - d);
        exps.push_back(w.e_theta + d);
    }
    ContractionParts best;
    size_t best_n = 0;
    for (int e : exps) {
        if (e < f.emin() - f.M || e > 0) continue;
        Fp theta = pow2(f, e);
        if (s2 < s1) theta = -theta;
        auto sols = pair_search(ar, cat, ar.mul(theta, s1), ar.mul(theta, s2), w.eta, w.eta_plus, 3, 24);
        for (const Chain& c : sols) {
            for (int64_t b : {c.b_lo + (c.b_hi - c.b_lo) / 2, c.b_lo, c.b_hi}) {
                Step st = make_step(cat, theta, c.ts, Fp(b));
                size_t n = settle(ar, act, st, w.eta, w.eta_plus, 200);
                if (n && (!best_n || n < best_n)) {
                    best_n = n;
                    best.mu.assign(n, st);
                    best.e_theta = e;
                }
            }
        }
        if (best_n) break;
    }
    if (!best_n) throw Error("contraction: no converging step found for " + act.name());
    best.tau_12 = build_tau(ar, act, cat, w.eta, w.eta_plus, w.c1, w.c2);
    best.tau_21 = build_tau(ar, act, cat, w.eta, w.eta_plus, w.c2, w.c1);
    return best;
}

MuZ build_mu_z(const Activation& act, const Witness& w, Fp z, Fp a, Fp b)
{
    const Format& f = act.fmt();
    Arith ar(f);
    Fp zp = succ(f, z);
    if (!zp.is_finite()) throw Error("mu_z: z has no finite successor");
    auto finite_ends = [&](Fp wt, Fp bias) {
        for (Fp x : {a, b}) {
            Fp y = ar.add(ar.mul(wt, x), bias);
            if (!y.is_finite()) return false;
        }
        return true;
    };
    for (bool case_a : {true, false}) {
        for (int64_t c = 1; c <= f.max_ord(); ++c) {
            Fp wt(case_a ? c : -c);
            Fp lo_side = ar.mul(wt, z), hi_side = ar.mul(wt, zp);
            // the side that must stay at or below eta
            Fp below = case_a ? lo_side : hi_side, above = case_a ? hi_side : lo_side;
            if (!(below < above) || !below.is_finite() || !above.is_finite()) continue;
            // largest bias keeping the low side at or below eta
            int64_t l = -f.max_ord(), r = f.max_ord();
            if (ar.add(below, Fp(l)) > w.eta) continue;
            while (l < r) {
                int64_t m = l + (r - l + 1) / 2;
                if (ar.add(below, Fp(m)) <= w.eta) l = m;
                else r = m - 1;
            }
            Fp bias(l);
            if (ar.add(above, bias) < w.eta_plus || !finite_ends(wt, bias)) continue;
            return MuZ{wt, bias, case_a};
        }
    }
    throw Error("mu_z: no weights found for z=" + encode(f, z));
}

Network mu_network(const Activation& act, const ContractionParts& p)
{
    NetBuilder nb(act.fmt(), act.name(), 1);
    auto h = nb.add_row(1, {{nb.input(0), from_int(act.fmt(), 1)}}, {}, Fp::zero());
    h = nb.chain(h, p.mu);
    return nb.finalize({h}, false, true);
}

Network tau_network(const Activation& act, const Step& tau)
{
    NetBuilder nb(act.fmt(), act.name(), 1);
    auto h = nb.add_row(1, {{nb.input(0), from_int(act.fmt(), 1)}}, {}, Fp::zero());
    h = nb.add_step(h, tau);
    return nb.finalize({h}, false, true);
}

Network mu_z_network(const Activation& act, const MuZ& m)
{
    NetBuilder nb(act.fmt(), act.name(), 1);
    auto h = nb.add_row(1, {{nb.input(0), m.w}}, {}, m.b);
    return nb.finalize({h}, false);
}

namespace {

Network chain_network(const SeparabilityKit& k, const std::vector<Step>& steps, bool raw_first)
{
    NetBuilder nb(k.fmt, k.act->name(), 1);
    NetBuilder::H h;
    size_t i = 0;
    if (raw_first) {
        h = nb.add_row(1, {{nb.input(0), steps[0].w}}, {}, steps[0].b);
        i = 1;
    } else {
        h = nb.add_row(1, {{nb.input(0), from_int(k.fmt, 1)}}, {}, Fp::zero());
    }
    for (; i < steps.size(); ++i) h = nb.add_step(h, steps[i]);
    return nb.finalize({h}, true, !raw_first);
}

} // namespace

Network SeparabilityKit::psi_network() const { return chain_network(*this, psi, false); }
Network SeparabilityKit::phi_le_network(Fp z) const { return chain_network(*this, phi_le(z), true); }
Network SeparabilityKit::phi_ge_network(Fp z) const { return chain_network(*this, phi_ge(z), true); }

Interval indicator_above(const SeparabilityKit& kit, const Interval& x)
{
    if (x.top) return x;
    if (x.hi <= kit.eta) return Interval::point(Fp::zero());
    if (x.lo >= kit.eta_plus) return Interval::point(kit.K);
    return hull(Fp::zero(), kit.K);
}

Interval indicator_range(Fp K, const Interval& x, Fp lo, Fp hi)
{
    if (x.top) return x;
    if (lo <= x.lo && x.hi <= hi) return Interval::point(K);
    if (x.hi < lo || x.lo > hi) return Interval::point(Fp::zero());
    return hull(Fp::zero(), K);
}

std::shared_ptr<SeparabilityKit> make_kit(ActPtr act, const Witness& w, Fp a, Fp b)
{
    const Format& f = act->fmt();
    if (!f.strict) throw Error("synthesis refuses relaxed formats");
    std::string why;
    if (!verify_witness(*act, w, &why)) throw Error("kit: invalid witness: " + why);
    if (!(a <= b)) throw Error("kit: empty domain");
    Arith ar(f);
    ContractionParts parts = build_contraction(*act, w);

    auto kit = std::make_shared<SeparabilityKit>();
    kit->fmt = f;
    kit->act = act;
    kit->K = w.K;
    kit->eta = w.eta;
    kit->eta_plus = w.eta_plus;
    kit->a = a;
    kit->b = b;
    kit->witness = w;
    kit->psi = parts.mu;
    kit->psi.push_back(parts.tau_12);
    kit->phi_len = parts.mu.size() + 2;

    auto cache = std::make_shared<std::map<int64_t, MuZ>>();
    auto mtx = std::make_shared<std::mutex>();
    auto muz = [act, w, a, b, cache, mtx](Fp z) {
        std::lock_guard<std::mutex> lock(*mtx);
        auto it = cache->find(z.c);
        if (it != cache->end()) return it->second;
        MuZ m = build_mu_z(*act, w, z, a, b);
        cache->emplace(z.c, m);
        return m;
    };
    auto chain = [parts](const MuZ& m, const Step& tau) {
        std::vector<Step> s{Step{m.w, {}, m.b}};
        s.insert(s.end(), parts.mu.begin(), parts.mu.end());
        s.push_back(tau);
        return s;
    };
    kit->phi_le = [muz, chain, parts](Fp z) {
        MuZ m = muz(z);
        return chain(m, m.case_a ? parts.tau_21 : parts.tau_12);
    };
    kit->phi_ge = [muz, chain, parts, f](Fp z) {
        MuZ m = muz(pred(f, z));
        return chain(m, m.case_a ? parts.tau_12 : parts.tau_21);
    };

    // spot checks: tau on its three inputs, psi on the contraction intervals
    for (const auto& [tau, t1, t2] : {std::tuple{parts.tau_12, w.c1, w.c2}, std::tuple{parts.tau_21, w.c2, w.c1}}) {
        Interval both = apply_step(ar, *act, tau, Interval(w.eta, w.eta_plus));
        if (apply_step(ar, *act, tau, w.eta) != t1 || apply_step(ar, *act, tau, w.eta_plus) != t2 || both != hull(t1, t2))
            throw Error("kit: tau postcondition failed");
    }
    Network psi = kit->psi_network();
    Fp big = largest(f);
    for (Interval I : {Interval(-big, w.eta), Interval(w.eta_plus, big), Interval(-big, big), Interval::point(w.eta)}) {
        if (psi.eval_interval({I})[0] != indicator_above(*kit, I)) throw Error("kit: psi postcondition failed");
    }
    for (Fp z : {a, b}) {
        Network le = kit->phi_le_network(z), ge = kit->phi_ge_network(z);
        Interval dom(a, b);
        if (le.eval_interval({dom})[0] != indicator_range(w.K, dom, a, z)) throw Error("kit: phi_le postcondition failed");
        if (ge.eval_interval({dom})[0] != indicator_range(w.K, dom, z, b)) throw Error("kit: phi_ge postcondition failed");
    }
    return kit;
}

std::shared_ptr<SeparabilityKit> make_kit(const Format& f, const std::string& activation)
{
    ActPtr act = Activation::make(f, activation);
    ConditionReport r = check_condition(*act);
    if (!r.ok) throw Error(activation + " fails " + r.failed + ": " + r.reason);
    return make_kit(act, *r.witness, from_int(f, -1), from_int(f, 1));
}

} // namespace fpiua

#include "fpiua/synth.hpp"

#include <algorithm>
#include <map>
#include <functional>
#include <set>

#include "fpiua/lemmas.hpp"

namespace fpiua {

namespace {

using H = NetBuilder::H;

class Synth {
public:
    Synth(const SeparabilityKit& kit, size_t dim) : kit_(kit), dim_(dim), nb_(kit.fmt, kit.act->name(), dim)
    {
        if (kit.psi.empty()) throw Error("synthesis: kit without psi steps");
    }

    NetBuilder& builder() { return nb_; }

    H phi(size_t coord, Fp z, bool ge)
    {
        auto key = std::make_tuple(coord, z.c, ge);
        auto it = phi_.find(key);
        if (it != phi_.end()) return it->second;
        std::vector<Step> steps = ge ? kit_.phi_ge(z) : kit_.phi_le(z);
        if (steps.size() != kit_.phi_len) throw Error("synthesis: phi chains of unequal length");
        H h = nb_.add_row(1, {{nb_.input(coord), steps[0].w}}, {}, steps[0].b);
        for (size_t i = 1; i < steps.size(); ++i) h = nb_.add_step(h, steps[i]);
        phi_.emplace(key, h);
        return h;
    }

    // psi(gadget(inputs)): K when every input is K, 0 when some input is 0
    H combine(const std::vector<H>& in)
    {
        const FanIn& g = fanin(in.size());
        std::vector<std::pair<H, Fp>> terms;
        for (H h : in) terms.push_back({h, g.alpha});
        std::sort(terms.begin(), terms.end(), [](auto x, auto y) { return x.first.idx < y.first.idx; });
        for (size_t i = 1; i < terms.size(); ++i)
            if (terms[i].first.idx == terms[i - 1].first.idx) throw Error("synthesis: repeated gadget input");
        H row = nb_.add_row(in.front().layer + 1, terms, {}, g.beta);
        return nb_.chain(row, kit_.psi);
    }

    H interval(size_t coord, Fp lo, Fp hi)
    {
        auto key = std::make_tuple(coord, lo.c, hi.c);
        auto it = interval_.find(key);
        if (it != interval_.end()) return it->second;
        H h = combine({phi(coord, lo, true), phi(coord, hi, false)});
        interval_.emplace(key, h);
        return h;
    }

    H box(const GridBox& b)
    {
        std::vector<int64_t> key;
        for (auto [lo, hi] : b) {
            key.push_back(lo.c);
            key.push_back(hi.c);
        }
        auto it = box_.find(key);
        if (it != box_.end()) return it->second;
        std::vector<H> level;
        for (size_t i = 0; i < dim_; ++i) level.push_back(interval(i, b[i].first, b[i].second));
        size_t chunk = size_t(1) << kit_.fmt.M;
        while (level.size() > 1) {
            std::vector<H> next;
            for (size_t i = 0; i < level.size(); i += chunk)
                next.push_back(combine(std::vector<H>(level.begin() + long(i), level.begin() + long(std::min(level.size(), i + chunk)))));
            level = next;
        }
        box_.emplace(key, level[0]);
        return level[0];
    }

    size_t combine_levels() const
    {
        size_t n = dim_, levels = 0, chunk = size_t(1) << kit_.fmt.M;
        while (n > 1) {
            n = (n + chunk - 1) / chunk;
            ++levels;
        }
        return levels;
    }

    uint32_t box_layer() const
    {
        return uint32_t(kit_.phi_len + (combine_levels() + 1) * (kit_.psi.size() + 1));
    }

    // the set indicator up to (not including) its last psi step
    H set_pre(const std::vector<GridBox>& boxes)
    {
        std::vector<H> hs;
        for (const auto& b : boxes) hs.push_back(box(b));
        std::sort(hs.begin(), hs.end(), [](H x, H y) { return x.idx < y.idx; });
        std::vector<std::pair<H, Fp>> terms;
        if (!hs.empty()) {
            Fp w = set_weight(kit_, hs.size());
            for (H h : hs) terms.push_back({h, w});
        }
        H row = nb_.add_row(box_layer() + 1, terms, {}, kit_.eta);
        for (size_t i = 0; i + 1 < kit_.psi.size(); ++i) row = nb_.add_step(row, kit_.psi[i]);
        return row;
    }

    H last_psi(H pre) { return nb_.add_step(pre, kit_.psi.back()); }

private:
    const FanIn& fanin(size_t n)
    {
        auto it = fanin_.find(n);
        if (it != fanin_.end()) return it->second;
        auto g = fanin_gadget(kit_.fmt, kit_.K, kit_.eta, n);
        if (!g) throw Error("synthesis: no fan-in gadget for " + std::to_string(n) + " inputs");
        return fanin_.emplace(n, *g).first->second;
    }

    const SeparabilityKit& kit_;
    size_t dim_;
    NetBuilder nb_;
    std::map<std::tuple<size_t, int64_t, bool>, H> phi_;
    std::map<std::tuple<size_t, int64_t, int64_t>, H> interval_;
    std::map<std::vector<int64_t>, H> box_;
    std::map<size_t, FanIn> fanin_;
};

void check_domain(const SeparabilityKit& kit, const GridBox& box)
{
    for (auto [lo, hi] : box)
        if (!(kit.a <= lo && lo <= hi && hi <= kit.b)) throw Error("synthesis: box outside the kit domain");
}

std::vector<GridBox> boxes_of(const std::vector<Fp>& grid, size_t dim, const std::vector<bool>& member)
{
    std::vector<GridBox> out;
    for (const auto& b : maximal_boxes(grid.size(), dim, member)) {
        GridBox g;
        for (auto [lo, hi] : b) g.push_back({grid[lo], grid[hi]});
        out.push_back(g);
    }
    return out;
}

} // namespace

Interval indicator_box(Fp K, const Box& x, const GridBox& box)
{
    bool inside = true;
    for (size_t i = 0; i < x.size(); ++i) {
        if (x[i].top) return x[i];
        if (x[i].hi < box[i].first || x[i].lo > box[i].second) return Interval::point(Fp::zero());
        if (x[i].lo < box[i].first || x[i].hi > box[i].second) inside = false;
    }
    if (inside) return Interval::point(K);
    return Interval(fmin(Fp::zero(), K), fmax(Fp::zero(), K));
}

std::vector<std::vector<std::pair<size_t, size_t>>> maximal_boxes(size_t grid, size_t dim, const std::vector<bool>& member)
{
    size_t total = 1;
    for (size_t i = 0; i < dim; ++i) total *= grid;
    if (member.size() != total) throw Error("maximal_boxes: membership table has the wrong size");
    auto unflat = [&](size_t k) {
        std::vector<size_t> idx(dim);
        for (size_t i = dim; i-- > 0;) {
            idx[i] = k % grid;
            k /= grid;
        }
        return idx;
    };
    std::vector<size_t> stride(dim, 1);
    for (size_t i = dim - 1; i-- > 0;) stride[i] = stride[i + 1] * grid;

    // axis compression: neighbours with identical slices collapse
    std::vector<std::vector<size_t>> starts(dim);
    for (size_t a = 0; a < dim; ++a) {
        std::vector<bool> differs(grid, false);
        for (size_t k = 0; k < total; ++k) {
            size_t i = (k / stride[a]) % grid;
            if (i + 1 < grid && member[k] != member[k + stride[a]]) differs[i + 1] = true;
        }
        for (size_t i = 0; i < grid; ++i)
            if (i == 0 || differs[i]) starts[a].push_back(i);
    }
    std::vector<size_t> cn(dim), cstride(dim, 1);
    size_t ctotal = 1;
    for (size_t a = 0; a < dim; ++a) {
        cn[a] = starts[a].size();
        ctotal *= cn[a];
    }
    for (size_t i = dim - 1; i-- > 0;) cstride[i] = cstride[i + 1] * cn[i + 1];
    // prefix counts over the compressed grid, (cn+1) per axis
    std::vector<size_t> pstride(dim, 1);
    size_t ptotal = 1;
    for (size_t a = 0; a < dim; ++a) ptotal *= cn[a] + 1;
    for (size_t i = dim - 1; i-- > 0;) pstride[i] = pstride[i + 1] * (cn[i + 1] + 1);
    std::vector<long> P(ptotal, 0);
    for (size_t k = 0; k < ctotal; ++k) {
        size_t rep = 0, pk = 0, r = k;
        for (size_t a = dim; a-- > 0;) {
            size_t ci = r % cn[a];
            r /= cn[a];
            rep += starts[a][ci] * stride[a];
            pk += (ci + 1) * pstride[a];
        }
        P[pk] = member[rep] ? 1 : 0;
    }
    for (size_t a = 0; a < dim; ++a)
        for (size_t k = 0; k < ptotal; ++k)
            if ((k / pstride[a]) % (cn[a] + 1) > 0) P[k] += P[k - pstride[a]];
    auto count = [&](const std::vector<std::pair<size_t, size_t>>& b) {
        long s = 0;
        for (size_t mask = 0; mask < (size_t(1) << dim); ++mask) {
            size_t k = 0;
            int sign = 1;
            for (size_t a = 0; a < dim; ++a) {
                if (mask >> a & 1) {
                    k += b[a].first * pstride[a];
                    sign = -sign;
                } else {
                    k += (b[a].second + 1) * pstride[a];
                }
            }
            s += sign * P[k];
        }
        return s;
    };
    auto full = [&](const std::vector<std::pair<size_t, size_t>>& b) {
        long vol = 1;
        for (auto [lo, hi] : b) vol *= long(hi - lo + 1);
        return count(b) == vol;
    };
    std::vector<std::vector<std::pair<size_t, size_t>>> out;
    std::vector<std::pair<size_t, size_t>> cur(dim);
    std::function<void(size_t)> rec = [&](size_t a) {
        if (a == dim) {
            if (!full(cur)) return;
            for (size_t i = 0; i < dim; ++i) {
                auto save = cur[i];
                bool grow = false;
                if (cur[i].first > 0) {
                    --cur[i].first;
                    grow = full(cur);
                    cur[i] = save;
                }
                if (!grow && cur[i].second + 1 < cn[i]) {
                    ++cur[i].second;
                    grow = full(cur);
                    cur[i] = save;
                }
                if (grow) return;
            }
            std::vector<std::pair<size_t, size_t>> b;
            for (size_t i = 0; i < dim; ++i) {
                size_t hi = cur[i].second + 1 < cn[i] ? starts[i][cur[i].second + 1] - 1 : grid - 1;
                b.push_back({starts[i][cur[i].first], hi});
            }
            out.push_back(b);
            return;
        }
        for (size_t lo = 0; lo < cn[a]; ++lo)
            for (size_t hi = lo; hi < cn[a]; ++hi) {
                cur[a] = {lo, hi};
                // a partial box that already fails cannot be completed
                rec(a + 1);
            }
    };
    (void)unflat;
    rec(0);
    return out;
}

Fp set_weight(const SeparabilityKit& kit, size_t n)
{
    const Format& f = kit.fmt;
    Arith ar(f);
    Fp best = Fp::nan(), best_t = Fp::nan();
    for (int64_t c = -f.max_ord(); c <= f.max_ord(); ++c) {
        Fp t = ar.mul(Fp(c), kit.K);
        if (!t.is_finite() || t <= Fp::zero()) continue;
        if (!best_t.is_nan() && t >= best_t) continue;
        if (ar.add(t, kit.eta) < kit.eta_plus) continue;
        Fp s = Fp::zero();
        for (size_t i = 0; i < n; ++i) s = ar.add(s, t);
        if (!ar.add(s, kit.eta).is_finite()) continue;
        best = Fp(c);
        best_t = t;
    }
    if (best.is_nan()) throw Error("set indicator: no weight found");
    return best;
}

std::vector<Fp> level_chain(const Format& f, Fp K, Fp from, Fp to)
{
    if (from == to) return {};
    Arith ar(f);
    bool up = from < to;
    std::map<int64_t, Fp> terms; // t -> w
    for (int64_t c = -f.max_ord(); c <= f.max_ord(); ++c) {
        Fp t = ar.mul(Fp(c), K);
        if (!t.is_finite() || t.is_zero() || (t > Fp::zero()) != up) continue;
        terms.emplace(t.c, Fp(c));
    }
    std::map<int64_t, std::pair<int64_t, Fp>> parent; // state -> (previous, w)
    std::vector<Fp> frontier{from};
    parent[from.c] = {from.c, Fp::nan()};
    while (!frontier.empty() && !parent.count(to.c)) {
        std::vector<Fp> next;
        for (Fp s : frontier)
            for (auto [t, w] : terms) {
                Fp v = ar.add(s, Fp(t));
                if (v.is_nan() || (up ? (v <= s || v > to) : (v >= s || v < to))) continue;
                if (parent.emplace(v.c, std::make_pair(s.c, w)).second) next.push_back(v);
            }
        frontier.swap(next);
    }
    if (!parent.count(to.c)) throw Error("level chain: " + encode(f, to) + " unreachable from " + encode(f, from));
    std::vector<Fp> ws;
    for (int64_t s = to.c; s != from.c; s = parent[s].first) ws.push_back(parent[s].second);
    std::reverse(ws.begin(), ws.end());
    return ws;
}

Network build_box_indicator(const SeparabilityKit& kit, const GridBox& box)
{
    check_domain(kit, box);
    Synth s(kit, box.size());
    H h = s.box(box);
    return s.builder().finalize({h}, true);
}

Network build_set_indicator(const SeparabilityKit& kit, size_t dim, const std::vector<bool>& member)
{
    auto grid = enumerate(kit.fmt, kit.a, kit.b);
    Synth s(kit, dim);
    H h = s.last_psi(s.set_pre(boxes_of(grid, dim, member)));
    return s.builder().finalize({h}, true);
}

Network synthesize_iua(const SeparabilityKit& kit, const Table& target)
{
    if (!(target.fmt == kit.fmt)) throw Error("synthesis: target and kit formats differ");
    if (target.lo != kit.a || target.hi != kit.b) throw Error("synthesis: target domain differs from the kit domain");
    const Format& f = kit.fmt;
    size_t d = target.dim;
    std::set<int64_t> distinct;
    for (Fp v : target.values) {
        if (v.is_nan()) throw Error("synthesis: NaN target value");
        distinct.insert(v.c);
    }
    std::vector<Fp> pos, neg;
    for (int64_t c : distinct) {
        if (c > 0) pos.push_back(Fp(c));
        if (c < 0) neg.push_back(Fp(c));
    }
    std::reverse(neg.begin(), neg.end()); // toward -inf

    Synth s(kit, d);
    std::vector<std::pair<H, Fp>> out_terms;
    auto level = [&](const std::vector<Fp>& levels, bool above) {
        Fp prev = Fp::zero();
        for (Fp v : levels) {
            std::vector<bool> member(target.points());
            for (size_t k = 0; k < member.size(); ++k) member[k] = above ? target.values[k] >= v : target.values[k] <= v;
            std::vector<Fp> ws = level_chain(f, kit.K, prev, v);
            H pre = s.set_pre(boxes_of(target.grid, d, member));
            for (Fp w : ws) out_terms.push_back({s.last_psi(pre), w});
            prev = v;
        }
    };
    level(pos, true);
    level(neg, false);
    if (out_terms.empty()) out_terms.push_back({s.last_psi(s.set_pre({})), Fp::zero()}); // keeps the depth uniform
    H out = s.builder().add_row(out_terms.front().first.layer + 1, out_terms, {}, Fp::zero());
    Network n = s.builder().finalize({out}, false);

    // self-check: every grid point, and the whole domain
    if (target.points() <= 100000)
        for (size_t k = 0; k < target.points(); ++k)
            if (n.eval(target.point(k))[0] != target.values[k]) throw Error("synthesis: pointwise check failed");
    Box dom(d, Interval(kit.a, kit.b));
    Fp lo = *std::min_element(target.values.begin(), target.values.end());
    Fp hi = *std::max_element(target.values.begin(), target.values.end());
    if (n.eval_interval(dom)[0] != Interval(lo, hi)) throw Error("synthesis: full-domain interval check failed");
    return n;
}

} // namespace fpiua

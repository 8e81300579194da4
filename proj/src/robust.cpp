#include "fpiua/robust.hpp"

#include <sstream>

#include "fpiua/synth.hpp"

namespace fpiua {

size_t classify(const std::vector<Fp>& y)
{
    if (y.empty()) throw Error("classify: empty vector");
    size_t best = 0;
    for (size_t i = 0; i < y.size(); ++i) {
        if (y[i].is_nan()) throw Error("classify: NaN component");
        if (y[i] > y[best]) best = i;
    }
    return best;
}

Box neighborhood(const Format& f, const std::vector<Fp>& x0, Fp delta, Fp lo, Fp hi)
{
    if (!delta.is_finite() || delta.negative()) throw Error("neighborhood: delta must be finite and non-negative");
    mpq_class d = to_rational(f, delta), l = to_rational(f, lo), h = to_rational(f, hi);
    Box b;
    for (Fp x : x0) {
        if (!x.is_finite() || x < lo || x > hi) throw Error("neighborhood: anchor outside the domain");
        mpq_class q = to_rational(f, x);
        mpq_class a = q - d, c = q + d;
        if (a < l) a = l;
        if (c > h) c = h;
        // smallest float >= a and largest float <= c; both exist since lo, hi are floats
        Fp p = round(f, a), r = round(f, c);
        if (to_rational(f, p) < a) p = succ(f, p);
        if (to_rational(f, r) > c) r = pred(f, r);
        b.push_back(Interval(p, r));
    }
    return b;
}

std::vector<size_t> reachable_classes(const Box& out)
{
    std::vector<size_t> r;
    for (const auto& I : out)
        if (I.top) {
            for (size_t i = 0; i < out.size(); ++i) r.push_back(i);
            return r;
        }
    // class i is reachable iff y_i = hi_i beats every other y_j = lo_j
    for (size_t i = 0; i < out.size(); ++i) {
        bool ok = true;
        for (size_t j = 0; j < out.size() && ok; ++j) {
            if (j == i) continue;
            ok = j < i ? out[i].hi > out[j].lo : out[i].hi >= out[j].lo;
        }
        if (ok) r.push_back(i);
    }
    return r;
}

RobustReport check_robust(const Classifier& c)
{
    const Format& f = c.fmt();
    const Table& t0 = c.scores.at(0);
    RobustReport rep;
    for (const auto& a : c.anchors) {
        AnchorVerdict v;
        v.anchor = a;
        v.box = neighborhood(f, a, c.delta, t0.lo, t0.hi);
        size_t want = classify(c.eval(a));
        v.robust = true;
        std::vector<std::vector<Fp>> axes;
        for (const auto& I : v.box) axes.push_back(enumerate(f, I.lo, I.hi));
        std::vector<size_t> idx(axes.size(), 0);
        while (v.robust) {
            std::vector<Fp> x;
            for (size_t i = 0; i < idx.size(); ++i) x.push_back(axes[i][idx[i]]);
            if (classify(c.eval(x)) != want) v.robust = false;
            size_t k = idx.size();
            while (k > 0 && ++idx[k - 1] == axes[k - 1].size()) idx[--k] = 0;
            if (k == 0) break;
        }
        rep.robust = rep.robust && v.robust;
        rep.anchors.push_back(v);
    }
    return rep;
}

bool is_robust(const Classifier& c) { return check_robust(c).robust; }

RobustReport check_provably_robust(const Network& n, Fp delta, const std::vector<std::vector<Fp>>& anchors, Fp lo, Fp hi)
{
    RobustReport rep;
    for (const auto& a : anchors) {
        AnchorVerdict v;
        v.anchor = a;
        v.box = neighborhood(n.fmt(), a, delta, lo, hi);
        v.output = n.eval_interval(v.box);
        v.robust = reachable_classes(v.output).size() == 1;
        rep.robust = rep.robust && v.robust;
        rep.anchors.push_back(v);
    }
    return rep;
}

bool is_provably_robust(const Network& n, Fp delta, const std::vector<std::vector<Fp>>& anchors, Fp lo, Fp hi)
{
    return check_provably_robust(n, delta, anchors, lo, hi).robust;
}

std::string RobustReport::text(const Format& f) const
{
    std::ostringstream o;
    for (const auto& v : anchors) {
        o << "anchor";
        for (Fp x : v.anchor) o << " " << encode(f, x);
        o << " box";
        for (const auto& I : v.box) o << " " << to_string(f, I);
        if (!v.output.empty()) {
            o << " output";
            for (const auto& I : v.output) o << " " << to_string(f, I);
        }
        o << " " << (v.robust ? "robust" : "NOT robust") << "\n";
    }
    o << (robust ? "PASS" : "FAIL") << " anchors=" << anchors.size() << "\n";
    return o.str();
}

Network stack_networks(const std::vector<Network>& parts)
{
    if (parts.empty()) throw Error("stack_networks: nothing to stack");
    const Network& p0 = parts[0];
    Network r(p0.fmt(), p0.activation_name(), p0.in_dim());
    r.no_last_affine = p0.no_last_affine;
    for (const auto& p : parts)
        if (p.depth() != p0.depth() || p.in_dim() != p0.in_dim() || p.no_last_affine != p0.no_last_affine ||
            p.no_first_affine || p.activation_name() != p0.activation_name())
            throw Error("stack_networks: component depth mismatch");
    r.layers.resize(p0.layers.size());
    std::vector<uint32_t> offset(parts.size(), 0); // column offset of each part in the previous layer
    for (size_t li = 0; li < p0.layers.size(); ++li) {
        Layer& L = r.layers[li];
        L.in_dim = li == 0 ? p0.in_dim() : r.layers[li - 1].rows.size();
        std::vector<uint32_t> next(parts.size());
        for (size_t k = 0; k < parts.size(); ++k) {
            next[k] = uint32_t(L.rows.size());
            for (Row row : parts[k].layers[li].rows) {
                for (auto& t : row.terms) t.first += offset[k];
                L.rows.push_back(std::move(row));
            }
        }
        offset = next;
    }
    r.validate();
    return r;
}

Network synthesize_robust(const Classifier& c, const SeparabilityKit& kit)
{
    if (!is_robust(c)) throw Error("synthesize_robust: classifier is not robust on its anchors");
    const Table& t0 = c.scores.at(0);
    Fp one = from_int(c.fmt(), 1);
    std::vector<Table> onehot(c.n_classes(), t0);
    for (size_t k = 0; k < t0.points(); ++k) {
        std::vector<Fp> y;
        for (const auto& s : c.scores) y.push_back(s.values[k]);
        size_t cls = classify(y);
        for (size_t i = 0; i < onehot.size(); ++i) onehot[i].values[k] = i == cls ? one : Fp::zero();
    }
    std::vector<Network> parts;
    for (const auto& t : onehot) parts.push_back(synthesize_iua(kit, t));
    Network n = stack_networks(parts);
    for (const auto& a : c.anchors)
        if (classify(n.eval(a)) != classify(c.eval(a))) throw Error("synthesize_robust: prediction differs at an anchor");
    if (!is_provably_robust(n, c.delta, c.anchors, t0.lo, t0.hi)) throw Error("synthesize_robust: certification failed");
    return n;
}

} // namespace fpiua

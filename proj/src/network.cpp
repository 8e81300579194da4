#include "fpiua/network.hpp"

#include <algorithm>

namespace fpiua {

Network::Network(const Format& f, const std::string& activation, size_t in_dim)
    : fmt_(f), act_name_(activation), act_(Activation::make(f, activation)), in_dim_(in_dim)
{
}

size_t Network::out_dim() const
{
    if (layers.empty()) return in_dim_;
    return layers.back().rows.size();
}

size_t Network::neuron_count() const
{
    size_t n = 0;
    for (const auto& l : layers) n += l.rows.size();
    return n;
}

size_t Network::weight_count() const
{
    size_t n = 0;
    for (const auto& l : layers)
        for (const auto& r : l.rows) n += r.terms.size();
    return n;
}

void Network::validate() const
{
    if (!act_) throw Error("network has no activation");
    size_t d = in_dim_;
    for (size_t li = 0; li < layers.size(); ++li) {
        const Layer& l = layers[li];
        if (l.in_dim != d) throw Error("layer " + std::to_string(li) + ": input dimension mismatch");
        if (l.rows.empty()) throw Error("layer " + std::to_string(li) + ": no rows");
        for (const Row& r : l.rows) {
            if (!r.bias.is_finite()) throw Error("non-finite bias");
            uint32_t prev = 0;
            bool first = true;
            for (auto [c, w] : r.terms) {
                if (c >= d) throw Error("column out of range");
                if (!first && c <= prev) throw Error("row columns not increasing");
                if (!w.is_finite()) throw Error("non-finite weight");
                prev = c;
                first = false;
            }
        }
        d = l.rows.size();
    }
    if (no_first_affine) {
        if (layers.empty()) throw Error("no_first_affine on an empty network");
        const Layer& l = layers.front();
        if (l.rows.size() < in_dim_) throw Error("no_first_affine: first layer narrower than input");
        for (size_t i = 0; i < l.rows.size(); ++i) {
            const Row& r = l.rows[i];
            bool ok = i < in_dim_ ? (r.terms.size() == 1 && r.terms[0].first == i && r.terms[0].second == from_int(fmt_, 1) &&
                                     r.bias.is_zero())
                                  : (r.terms.empty() || std::all_of(r.terms.begin(), r.terms.end(), [](auto t) { return t.second.is_zero(); }));
            if (!ok) throw Error("no_first_affine: first layer is not a rectangular identity");
        }
    }
}

namespace {

Fp row_eval(const Arith& a, const Row& r, const std::vector<Fp>& v, size_t nonfinite)
{
    Fp acc = Fp::zero();
    bool first = true;
    size_t seen = 0;
    for (auto [c, w] : r.terms) {
        Fp x = v[c];
        if (!x.is_finite()) ++seen;
        Fp t = a.mul(x, w);
        acc = first ? t : a.add(acc, t);
        first = false;
    }
    if (seen < nonfinite) return Fp::nan(); // 0 * inf or 0 * NaN in an implicit column
    return a.add(acc, r.bias);
}

bool bad_interval(const Interval& I) { return I.top || !I.lo.is_finite() || !I.hi.is_finite(); }

Interval row_eval_interval(const Arith& a, const Row& r, const Box& v, size_t bad)
{
    Interval acc = Interval::point(Fp::zero());
    bool first = true;
    size_t seen = 0;
    for (auto [c, w] : r.terms) {
        const Interval& x = v[c];
        if (x.top) return Interval::top_value();
        if (bad_interval(x)) ++seen;
        Interval t = iv_scale(a, x, w);
        acc = first ? t : iv_add(a, acc, t);
        if (acc.top) return acc;
        first = false;
    }
    if (seen < bad) return Interval::top_value();
    return iv_add(a, acc, Interval::point(r.bias));
}

} // namespace

std::vector<Fp> Network::eval(const std::vector<Fp>& x) const
{
    if (x.size() != in_dim_) throw Error("eval: input dimension mismatch");
    Arith a(fmt_);
    std::vector<Fp> v = x, next;
    for (size_t li = 0; li < layers.size(); ++li) {
        size_t nf = 0;
        for (Fp y : v)
            if (!y.is_finite()) ++nf;
        const Layer& l = layers[li];
        next.resize(l.rows.size());
        for (size_t i = 0; i < l.rows.size(); ++i) next[i] = row_eval(a, l.rows[i], v, nf);
        bool last = li + 1 == layers.size();
        if (!last || no_last_affine)
            for (Fp& y : next) y = (*act_)(y);
        v.swap(next);
    }
    return v;
}

std::vector<Box> Network::trace_interval(const Box& b) const
{
    if (b.size() != in_dim_) throw Error("eval_interval: input dimension mismatch");
    Arith a(fmt_);
    std::vector<Box> out;
    Box v = b, next;
    for (size_t li = 0; li < layers.size(); ++li) {
        size_t bad = 0;
        for (const auto& I : v)
            if (bad_interval(I)) ++bad;
        const Layer& l = layers[li];
        next.resize(l.rows.size());
        for (size_t i = 0; i < l.rows.size(); ++i) next[i] = row_eval_interval(a, l.rows[i], v, bad);
        out.push_back(next);
        bool last = li + 1 == layers.size();
        if (!last || no_last_affine)
            for (auto& I : next) I = act_->lift(I);
        v.swap(next);
    }
    out.push_back(v);
    return out;
}

Box Network::eval_interval(const Box& b) const
{
    if (b.size() != in_dim_) throw Error("eval_interval: input dimension mismatch");
    Arith a(fmt_);
    Box v = b, next;
    for (size_t li = 0; li < layers.size(); ++li) {
        size_t bad = 0;
        for (const auto& I : v)
            if (bad_interval(I)) ++bad;
        const Layer& l = layers[li];
        next.resize(l.rows.size());
        for (size_t i = 0; i < l.rows.size(); ++i) next[i] = row_eval_interval(a, l.rows[i], v, bad);
        bool last = li + 1 == layers.size();
        if (!last || no_last_affine)
            for (auto& I : next) I = act_->lift(I);
        v.swap(next);
    }
    return v;
}

std::vector<std::vector<Fp>> Network::dense_weights(size_t layer) const
{
    const Layer& l = layers.at(layer);
    std::vector<std::vector<Fp>> W(l.rows.size(), std::vector<Fp>(l.in_dim, Fp::zero()));
    for (size_t i = 0; i < l.rows.size(); ++i)
        for (auto [c, w] : l.rows[i].terms) W[i][c] = w;
    return W;
}

Layer Network::dense_layer(const std::vector<std::vector<Fp>>& W, const std::vector<Fp>& b)
{
    if (W.size() != b.size()) throw Error("dense_layer: shape mismatch");
    Layer l;
    l.in_dim = W.empty() ? 0 : W[0].size();
    for (size_t i = 0; i < W.size(); ++i) {
        if (W[i].size() != l.in_dim) throw Error("dense_layer: ragged matrix");
        Row r;
        r.bias = b[i];
        for (size_t j = 0; j < W[i].size(); ++j)
            if (!W[i][j].is_zero()) r.terms.push_back({uint32_t(j), W[i][j]});
        l.rows.push_back(std::move(r));
    }
    return l;
}

Network compose(const Network& outer, const Network& inner)
{
    if (!(outer.fmt() == inner.fmt())) throw Error("compose: format mismatch");
    if (outer.activation_name() != inner.activation_name()) throw Error("compose: activation mismatch");
    if (inner.out_dim() != outer.in_dim()) throw Error("compose: dimension mismatch");
    Network r(inner.fmt(), inner.activation_name(), inner.in_dim());
    r.no_first_affine = inner.no_first_affine;
    r.no_last_affine = outer.no_last_affine;
    if (inner.no_last_affine) {
        r.layers = inner.layers;
        r.layers.insert(r.layers.end(), outer.layers.begin(), outer.layers.end());
    } else if (outer.no_first_affine) {
        // the outer first layer passes inner outputs through and appends bias-only rows
        r.layers = inner.layers;
        Layer& junction = r.layers.back();
        const Layer& of = outer.layers.front();
        for (size_t i = junction.rows.size(); i < of.rows.size(); ++i) {
            Row c;
            c.bias = of.rows[i].bias;
            junction.rows.push_back(c);
        }
        r.layers.insert(r.layers.end(), outer.layers.begin() + 1, outer.layers.end());
    } else {
        throw Error("compose: junction needs inner without last affine layer or outer without first affine layer");
    }
    if (r.layers.empty()) throw Error("compose: empty result");
    r.validate();
    return r;
}

Network relu_min_network(const Format& f)
{
    Fp one = from_int(f, 1), half = pow2(f, -1), z = Fp::zero();
    Network n(f, "relu", 2);
    n.layers.push_back(Network::dense_layer({{one, one}, {-one, -one}, {one, -one}, {-one, one}}, {z, z, z, z}));
    n.layers.push_back(Network::dense_layer({{half, -half, -half, -half}}, {z}));
    return n;
}

Network identity_network(const Format& f, size_t dim, const std::string& activation)
{
    Network n(f, activation, dim);
    Layer l;
    l.in_dim = dim;
    for (size_t i = 0; i < dim; ++i) {
        Row r;
        r.terms.push_back({uint32_t(i), from_int(f, 1)});
        r.bias = Fp::zero();
        l.rows.push_back(r);
    }
    n.layers.push_back(l);
    return n;
}

} // namespace fpiua

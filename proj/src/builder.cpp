#include "fpiua/builder.hpp"

namespace fpiua {

Fp apply_step(const Arith& a, const Activation& act, const Step& s, Fp x, bool raw)
{
    Fp acc = a.mul(raw ? x : act(x), s.w);
    for (auto [z, alpha] : s.consts) acc = a.add(acc, a.mul(act(z), alpha));
    return a.add(acc, s.b);
}

Interval apply_step(const Arith& a, const Activation& act, const Step& s, const Interval& x, bool raw)
{
    Interval acc = iv_scale(a, raw ? x : act.lift(x), s.w);
    for (auto [z, alpha] : s.consts) acc = iv_add(a, acc, Interval::point(a.mul(act(z), alpha)));
    return iv_add(a, acc, Interval::point(s.b));
}

NetBuilder::NetBuilder(const Format& f, const std::string& activation, size_t in_dim)
    : fmt_(f), act_(activation), in_dim_(in_dim), rows_(1), group_ids_(1), groups_(1)
{
}

NetBuilder::H NetBuilder::input(size_t i) const
{
    if (i >= in_dim_) throw Error("builder: input index out of range");
    return H{0, uint32_t(i)};
}

NetBuilder::H NetBuilder::add_row(uint32_t layer, const std::vector<std::pair<H, Fp>> & terms,
                                  const std::vector<std::pair<Fp, Fp>>& consts, Fp bias)
{
    if (layer == 0) throw Error("builder: layer 0 is the input");
    if (layer == 1 && !consts.empty()) throw Error("builder: constant neurons need a previous hidden layer");
    while (rows_.size() <= layer) {
        rows_.emplace_back();
        group_ids_.emplace_back();
        groups_.emplace_back();
    }
    PRow r;
    r.bias = bias;
    bool first = true;
    uint32_t prev = 0;
    for (auto [h, w] : terms) {
        if (h.layer + 1 != layer) throw Error("builder: term does not come from the previous layer");
        if (h.layer > 0 && h.idx >= rows_[h.layer].size()) throw Error("builder: unknown handle");
        if (!first && h.idx <= prev) throw Error("builder: terms must be in increasing column order");
        r.terms.push_back({h.idx, w});
        prev = h.idx;
        first = false;
    }
    if (!consts.empty()) {
        std::vector<int64_t> key;
        std::vector<Fp> zs;
        for (auto [z, alpha] : consts) {
            key.push_back(z.c);
            zs.push_back(z);
            r.alphas.push_back(alpha);
        }
        auto& ids = group_ids_[layer - 1];
        auto it = ids.find(key);
        if (it == ids.end()) {
            it = ids.emplace(key, int(groups_[layer - 1].size())).first;
            groups_[layer - 1].push_back(zs);
        }
        r.group = it->second;
    }
    rows_[layer].push_back(std::move(r));
    return H{layer, uint32_t(rows_[layer].size() - 1)};
}

NetBuilder::H NetBuilder::chain(H in, const std::vector<Step>& steps)
{
    for (const Step& s : steps) in = add_step(in, s);
    return in;
}

Network NetBuilder::finalize(const std::vector<H>& outputs, bool no_last_affine, bool no_first_affine)
{
    size_t L = rows_.size() - 1;
    if (L == 0) throw Error("builder: no layers");
    if (outputs.size() != rows_[L].size()) throw Error("builder: last layer must hold exactly the outputs");
    for (size_t i = 0; i < outputs.size(); ++i)
        if (outputs[i].layer != L || outputs[i].idx != i) throw Error("builder: outputs out of order");
    if (!groups_[L].empty()) throw Error("builder: constant neurons in the last layer");

    Network n(fmt_, act_, in_dim_);
    n.no_last_affine = no_last_affine;
    n.no_first_affine = no_first_affine;
    const Fp zero = Fp::zero();
    std::vector<size_t> width(L + 1), group_base;
    width[0] = in_dim_;
    std::vector<std::vector<size_t>> offsets(L + 1);
    for (size_t k = 1; k <= L; ++k) {
        if (rows_[k].empty() && groups_[k].empty()) rows_[k].push_back(PRow{{}, -1, {}, zero}); // keep the layer alive
        size_t w = rows_[k].size();
        for (const auto& g : groups_[k]) {
            offsets[k].push_back(w);
            w += g.size();
        }
        width[k] = w;
    }
    for (size_t k = 1; k <= L; ++k) {
        Layer l;
        l.in_dim = width[k - 1];
        l.rows.reserve(width[k]);
        for (const PRow& pr : rows_[k]) {
            Row r;
            r.terms = pr.terms;
            r.bias = pr.bias;
            if (pr.group >= 0) {
                size_t base = offsets[k - 1][size_t(pr.group)];
                for (size_t i = 0; i < pr.alphas.size(); ++i) r.terms.push_back({uint32_t(base + i), pr.alphas[i]});
            }
            // zero weights are implicit
            std::erase_if(r.terms, [](const auto& t) { return t.second.is_zero(); });
            l.rows.push_back(std::move(r));
        }
        for (const auto& g : groups_[k])
            for (Fp z : g) l.rows.push_back(Row{{}, z});
        n.layers.push_back(std::move(l));
    }
    n.validate();
    return n;
}

} // namespace fpiua

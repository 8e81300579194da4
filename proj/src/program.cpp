#include "fpiua/program.hpp"

#include <algorithm>
#include <map>

namespace fpiua {

void Program::validate() const
{
    for (size_t k = 0; k < code.size(); ++k) {
        const Instr& in = code[k];
        size_t slot = arity + k;
        if (in.op == Op::Const) {
            if (in.c.is_nan()) throw Error("program: NaN constant");
        } else if (in.a >= slot || in.b >= slot) {
            throw Error("program: operand does not precede its use");
        }
    }
    for (uint32_t o : outputs)
        if (o >= slot_count()) throw Error("program: output slot out of range");
}

std::vector<Fp> run_program(const Program& p, const std::vector<Fp>& x)
{
    if (x.size() != p.arity) throw Error("run_program: arity mismatch");
    Arith a(p.fmt);
    std::vector<Fp> s(x);
    s.reserve(p.slot_count());
    for (const Instr& in : p.code) {
        switch (in.op) {
        case Op::Const: s.push_back(in.c); break;
        case Op::Add: s.push_back(a.add(s[in.a], s[in.b])); break;
        case Op::Mul: s.push_back(a.mul(s[in.a], s[in.b])); break;
        }
    }
    std::vector<Fp> out;
    for (uint32_t o : p.outputs) out.push_back(s[o]);
    return out;
}

namespace {

// table-index interval evaluation; lo < 0 marks Top
struct Slot {
    int32_t lo, hi;
};

template <bool IsMul>
Slot corners(const OpTables& t, const std::vector<int32_t>& tab, Slot x, Slot y)
{
    if (x.lo < 0 || y.lo < 0) return {-1, -1};
    const int32_t nan = int32_t(t.span - 1);
    size_t s = size_t(t.span);
    int32_t v[4] = {tab[size_t(x.lo) * s + size_t(y.lo)], tab[size_t(x.lo) * s + size_t(y.hi)], tab[size_t(x.hi) * s + size_t(y.lo)],
                    tab[size_t(x.hi) * s + size_t(y.hi)]};
    if (!IsMul) {
        // (+) is monotone in both arguments; the mixed corners only matter for inf - inf
        if (v[0] == nan || v[1] == nan || v[2] == nan || v[3] == nan) return {-1, -1};
        return {v[0], v[3]};
    }
    int32_t lo = v[0], hi = v[0];
    for (int32_t k : v) {
        if (k == nan) return {-1, -1};
        lo = std::min(lo, k);
        hi = std::max(hi, k);
    }
    return {lo, hi};
}

Box run_tabulated(const Program& p, const OpTables& t, const Box& b)
{
    thread_local std::vector<Slot> s;
    s.resize(p.slot_count());
    for (size_t i = 0; i < b.size(); ++i) s[i] = b[i].top ? Slot{-1, -1} : Slot{t.idx(b[i].lo), t.idx(b[i].hi)};
    size_t k = p.arity;
    for (const Instr& in : p.code) {
        switch (in.op) {
        case Op::Const: s[k] = Slot{t.idx(in.c), t.idx(in.c)}; break;
        case Op::Add: s[k] = corners<false>(t, t.add, s[in.a], s[in.b]); break;
        case Op::Mul: s[k] = corners<true>(t, t.mul, s[in.a], s[in.b]); break;
        }
        ++k;
    }
    Box out;
    for (uint32_t o : p.outputs) {
        Slot v = s[o];
        out.push_back(v.lo < 0 ? Interval::top_value() : Interval(t.val(v.lo), t.val(v.hi)));
    }
    return out;
}

} // namespace

Box run_program_interval(const Program& p, const Box& b)
{
    if (b.size() != p.arity) throw Error("run_program_interval: arity mismatch");
    if (const OpTables* t = op_tables(p.fmt)) return run_tabulated(p, *t, b);
    Arith a(p.fmt);
    Box s(b);
    s.reserve(p.slot_count());
    for (const Instr& in : p.code) {
        switch (in.op) {
        case Op::Const: s.push_back(Interval::point(in.c)); break;
        case Op::Add: s.push_back(iv_add(a, s[in.a], s[in.b])); break;
        case Op::Mul: s.push_back(iv_mul(a, s[in.a], s[in.b])); break;
        }
    }
    Box out;
    for (uint32_t o : p.outputs) out.push_back(s[o]);
    return out;
}

Program compile_to_program(const Network& n)
{
    Box dom(n.in_dim(), Interval(Fp::neg_inf(), Fp::pos_inf()));
    return compile_to_program(n, dom);
}

namespace {

bool may_be_nonfinite(const Interval& I) { return I.top || !I.lo.is_finite() || !I.hi.is_finite(); }

} // namespace

Program compile_to_program(const Network& n, const Box& domain)
{
    if (n.activation_name() != "identity") throw Error("compile_to_program: activation must be identity");
    n.validate();
    const Format& f = n.fmt();
    Program p;
    p.fmt = f;
    p.arity = n.in_dim();
    std::map<int64_t, uint32_t> consts;
    auto emit = [&](Instr in) {
        p.code.push_back(in);
        return uint32_t(p.arity + p.code.size() - 1);
    };
    auto constant = [&](Fp c) {
        auto it = consts.find(c.c);
        if (it != consts.end()) return it->second;
        uint32_t s = emit({Op::Const, 0, 0, c});
        consts[c.c] = s;
        return s;
    };
    const Fp one = from_int(f, 1);

    std::vector<uint32_t> cur(n.in_dim());
    for (size_t i = 0; i < cur.size(); ++i) cur[i] = uint32_t(i);
    Box box = domain;
    auto traces = n.trace_interval(domain);
    for (size_t li = 0; li < n.layers.size(); ++li) {
        const Layer& l = n.layers[li];
        std::vector<bool> risky(l.in_dim);
        for (size_t j = 0; j < l.in_dim; ++j) risky[j] = may_be_nonfinite(box[j]);
        std::vector<uint32_t> next;
        for (const Row& r : l.rows) {
            std::vector<std::pair<uint32_t, Fp>> terms;
            size_t t = 0;
            for (uint32_t j = 0; j < l.in_dim; ++j) {
                if (t < r.terms.size() && r.terms[t].first == j) {
                    terms.push_back(r.terms[t++]);
                } else if (risky[j]) {
                    terms.push_back({j, Fp::zero()});
                }
            }
            bool have = false;
            uint32_t acc = 0;
            for (auto [j, w] : terms) {
                // x (*) 1 = x on every float and every interval
                uint32_t term = w == one ? cur[j] : emit({Op::Mul, cur[j], constant(w), {}});
                acc = have ? emit({Op::Add, acc, term, {}}) : term;
                have = true;
            }
            if (!have) {
                acc = constant(r.bias);
            } else if (!r.bias.is_zero()) {
                acc = emit({Op::Add, acc, constant(r.bias), {}});
            }
            next.push_back(acc);
        }
        cur = std::move(next);
        box = traces[li];
    }
    p.outputs = cur;
    p.validate();
    return p;
}

} // namespace fpiua

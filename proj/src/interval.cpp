#include "fpiua/interval.hpp"

#include <algorithm>

namespace fpiua {

Interval::Interval(Fp a, Fp b) : lo(a), hi(b)
{
    if (a.is_nan() || b.is_nan() || b < a) throw Error("malformed interval");
}

namespace {

template <class Op>
Interval corners(const Interval& x, const Interval& y, Op op)
{
    if (x.top || y.top) return Interval::top_value();
    Fp s[4] = {op(x.lo, y.lo), op(x.lo, y.hi), op(x.hi, y.lo), op(x.hi, y.hi)};
    Fp lo = s[0], hi = s[0];
    for (Fp v : s) {
        if (v.is_nan()) return Interval::top_value();
        lo = fmin(lo, v);
        hi = fmax(hi, v);
    }
    Interval r;
    r.lo = lo;
    r.hi = hi;
    return r;
}

} // namespace

Interval iv_add(const Arith& a, const Interval& x, const Interval& y)
{
    return corners(x, y, [&](Fp p, Fp q) { return a.add(p, q); });
}

Interval iv_sub(const Arith& a, const Interval& x, const Interval& y)
{
    return corners(x, y, [&](Fp p, Fp q) { return a.sub(p, q); });
}

Interval iv_mul(const Arith& a, const Interval& x, const Interval& y)
{
    return corners(x, y, [&](Fp p, Fp q) { return a.mul(p, q); });
}

Interval iv_scale(const Arith& a, const Interval& x, Fp w)
{
    if (x.top) return x;
    Fp p = a.mul(x.lo, w), q = a.mul(x.hi, w);
    if (p.is_nan() || q.is_nan()) return Interval::top_value();
    Interval r;
    r.lo = fmin(p, q);
    r.hi = fmax(p, q);
    return r;
}

Interval iv_lift(const Format& f, const FpFn& phi, const std::vector<Fp>& breakpoints, const Interval& x)
{
    if (x.top) return x;
    std::vector<Fp> pts{x.lo, x.hi};
    for (Fp b : breakpoints)
        if (x.lo < b && b < x.hi) pts.push_back(b);
    Fp lo = Fp::pos_inf(), hi = Fp::neg_inf();
    for (Fp p : pts) {
        Fp v = phi(p);
        if (v.is_nan()) return Interval::top_value();
        lo = fmin(lo, v);
        hi = fmax(hi, v);
    }
    (void)f;
    return Interval(lo, hi);
}

Interval iv_lift_exhaustive(const Format& f, const FpFn& phi, const Interval& x)
{
    if (x.top) return x;
    Fp lo = Fp::pos_inf(), hi = Fp::neg_inf();
    Fp p = x.lo;
    while (true) {
        Fp v = phi(p);
        if (v.is_nan()) return Interval::top_value();
        lo = fmin(lo, v);
        hi = fmax(hi, v);
        if (p == x.hi) break;
        p = succ(f, p);
    }
    return Interval(lo, hi);
}

Box iv_affine(const Format& f, const std::vector<std::vector<Fp>>& W, const std::vector<Fp>& b, const Box& x)
{
    if (W.size() != b.size()) throw Error("iv_affine: shape mismatch");
    Arith a(f);
    Box out;
    out.reserve(W.size());
    for (size_t i = 0; i < W.size(); ++i) {
        if (W[i].size() != x.size()) throw Error("iv_affine: shape mismatch");
        Interval acc;
        for (size_t j = 0; j < x.size(); ++j) {
            Interval t = iv_scale(a, x[j], W[i][j]);
            acc = j == 0 ? t : iv_add(a, acc, t);
        }
        if (x.empty()) acc = Interval::point(Fp::zero());
        out.push_back(iv_add(a, acc, Interval::point(b[i])));
    }
    return out;
}

std::vector<Fp> concretize(const Format& f, const Interval& x)
{
    if (x.top) throw Error("cannot enumerate Top");
    return enumerate(f, x.lo, x.hi);
}

std::string to_string(const Format& f, const Interval& x)
{
    if (x.top) return "Top";
    return "[" + encode(f, x.lo) + "," + encode(f, x.hi) + "]";
}

Interval parse_interval(const Format& f, const std::string& s)
{
    if (s == "Top") return Interval::top_value();
    if (s.size() < 2 || s.front() != '[' || s.back() != ']') throw Error("bad interval '" + s + "'");
    std::string body = s.substr(1, s.size() - 2);
    size_t comma = body.find(',');
    if (comma == std::string::npos) throw Error("bad interval '" + s + "'");
    return Interval(decode(f, body.substr(0, comma)), decode(f, body.substr(comma + 1)));
}

std::string to_string(const Format& f, const Box& b)
{
    std::string s;
    for (size_t i = 0; i < b.size(); ++i) {
        if (i) s += ",";
        s += to_string(f, b[i]);
    }
    return s;
}

Box parse_box(const Format& f, const std::string& s)
{
    Box b;
    size_t i = 0;
    while (i < s.size()) {
        if (s[i] == ',' || s[i] == ' ') {
            ++i;
            continue;
        }
        if (s.compare(i, 3, "Top") == 0) {
            b.push_back(Interval::top_value());
            i += 3;
            continue;
        }
        size_t close = s.find(']', i);
        if (s[i] != '[' || close == std::string::npos) throw Error("bad box '" + s + "'");
        b.push_back(parse_interval(f, s.substr(i, close - i + 1)));
        i = close + 1;
    }
    return b;
}

} // namespace fpiua

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fpiua/fp.hpp"

namespace fpiua {

// <lo,hi> over the non-NaN floats, or Top
struct Interval {
    bool top = false;
    Fp lo, hi;

    Interval() = default;
    Interval(Fp a, Fp b);
    static Interval point(Fp x) { return Interval(x, x); }
    static Interval top_value()
    {
        Interval r;
        r.top = true;
        return r;
    }
    bool is_point() const { return !top && lo == hi; }
    bool contains(Fp x) const { return top || (!x.is_nan() && lo <= x && x <= hi); }

    friend bool operator==(const Interval& a, const Interval& b)
    {
        if (a.top || b.top) return a.top == b.top;
        return a.lo == b.lo && a.hi == b.hi;
    }
    friend bool operator!=(const Interval& a, const Interval& b) { return !(a == b); }
};

using Box = std::vector<Interval>;

Interval iv_add(const Arith& a, const Interval& x, const Interval& y);
Interval iv_sub(const Arith& a, const Interval& x, const Interval& y);
Interval iv_mul(const Arith& a, const Interval& x, const Interval& y);
// x (*) <w,w>, the only product shape affine layers need
Interval iv_scale(const Arith& a, const Interval& x, Fp w);

inline Interval iv_add(const Format& f, const Interval& x, const Interval& y) { return iv_add(Arith(f), x, y); }
inline Interval iv_sub(const Format& f, const Interval& x, const Interval& y) { return iv_sub(Arith(f), x, y); }
inline Interval iv_mul(const Format& f, const Interval& x, const Interval& y) { return iv_mul(Arith(f), x, y); }

using FpFn = std::function<Fp(Fp)>;

// phi is monotone on each piece between consecutive breakpoints (and beyond them)
Interval iv_lift(const Format& f, const FpFn& phi, const std::vector<Fp>& breakpoints, const Interval& x);
// brute force image hull
Interval iv_lift_exhaustive(const Format& f, const FpFn& phi, const Interval& x);

// componentwise (fold of I_j (*) w_ij) (+) b_i, same order as the concrete affine map
Box iv_affine(const Format& f, const std::vector<std::vector<Fp>>& W, const std::vector<Fp>& b, const Box& x);

std::vector<Fp> concretize(const Format& f, const Interval& x); // Top not allowed

std::string to_string(const Format& f, const Interval& x);
Interval parse_interval(const Format& f, const std::string& s);
std::string to_string(const Format& f, const Box& b);
Box parse_box(const Format& f, const std::string& s);

} // namespace fpiua

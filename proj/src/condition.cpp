#include "fpiua/condition.hpp"

#include <algorithm>
#include <sstream>

namespace fpiua {

namespace {

// x / omega as an integer; every finite float is a multiple of omega
mpz_class units(const Format& f, Fp x)
{
    mpq_class q = to_rational(f, x) / f.omega();
    return q.get_num();
}

mpq_class pow2q(int k)
{
    mpq_class r(1);
    if (k >= 0) mpz_mul_2exp(r.get_num_mpz_t(), r.get_num_mpz_t(), k);
    else mpz_mul_2exp(r.get_den_mpz_t(), r.get_den_mpz_t(), -k);
    return r;
}

mpq_class qabs(const mpq_class& q) { return q < 0 ? mpq_class(-q) : q; }

int floor_log2(const mpq_class& q)
{
    // q > 0
    long n = long(mpz_sizeinbase(q.get_num_mpz_t(), 2)) - 1;
    long d = long(mpz_sizeinbase(q.get_den_mpz_t(), 2)) - 1;
    long k = n - d;
    if (pow2q(int(k)) > q) --k;
    return int(k);
}

bool in_k_range(const Format& f, Fp k)
{
    auto [lo, hi] = k_range(f);
    mpq_class a = qabs(to_rational(f, k));
    return lo <= a && a <= hi;
}

struct Tables {
    std::vector<Fp> xs; // all finite floats, ascending
    std::vector<Fp> ys; // sigma(xs)
    // the same values in units of omega; 128-bit when products fit
    bool narrow = false;
    std::vector<__int128> ux, uy;
    std::vector<mpz_class> zx, zy;
};

Tables tabulate(const Activation& act)
{
    const Format& f = act.fmt();
    Tables t;
    t.xs = enumerate(f, -largest(f), largest(f));
    t.ys.reserve(t.xs.size());
    for (Fp x : t.xs) t.ys.push_back(act(x));
    t.narrow = f.emax() - f.emin() + f.M + 2 <= 62;
    for (size_t i = 0; i < t.xs.size(); ++i) {
        mpz_class a = units(f, t.xs[i]), b = units(f, t.ys[i]);
        if (t.narrow) {
            t.ux.push_back((__int128)a.get_si());
            t.uy.push_back((__int128)b.get_si());
        } else {
            t.zx.push_back(a);
            t.zy.push_back(b);
        }
    }
    return t;
}

size_t index_of(const Format& f, Fp x) { return size_t(x.c + f.max_ord()); }

bool check_c1(const Activation& act, Fp c1, Fp c2, std::string* why)
{
    const Format& f = act.fmt();
    auto fail = [&](const std::string& s) {
        if (why) *why = s;
        return false;
    };
    if (!c1.is_finite() || !c2.is_finite()) return fail("C1: c1, c2 must be finite");
    if (!act(c1).is_zero()) return fail("C1: sigma(c1) != 0");
    Fp k = act(c2);
    if (!in_k_range(f, k)) return fail("C1: |sigma(c2)| outside the magnitude window");
    Fp thr = pow2(f, f.emin() + 1);
    if (fmax(c1.c < 0 ? -c1 : c1, c2.c < 0 ? -c2 : c2) < thr) return fail("C1: max(|c1|,|c2|) < 2^(emin+1)");
    auto [lo, hi] = act.range_minmax(fmin(c1, c2), fmax(c1, c2));
    if (lo < fmin(Fp::zero(), k) || hi > fmax(Fp::zero(), k)) return fail("C1: sigma leaves [sigma(c1), sigma(c2)] between c1 and c2");
    return true;
}

// threshold property at eta, increasing or decreasing
bool threshold_ok(const Activation& act, Fp eta, bool* increasing)
{
    const Format& f = act.fmt();
    Fp ep = succ(f, eta);
    if (!ep.is_finite()) return false;
    Fp s = act(eta), sp = act(ep);
    if (s == sp) return false;
    auto [llo, lhi] = act.range_minmax(-largest(f), eta);
    auto [rlo, rhi] = act.range_minmax(ep, largest(f));
    if (s < sp) {
        *increasing = true;
        return lhi <= s && rlo >= sp;
    }
    *increasing = false;
    return llo >= s && rhi <= sp;
}

bool c2_magnitudes(const Format& f, Fp eta, Fp s, Fp sp)
{
    mpq_class ae = qabs(to_rational(f, eta));
    if (ae < pow2q(f.emin() + 5) || ae > 4 - 8 * f.eps()) return false;
    mpq_class lo = pow2q(f.emin() + 5), hi = pow2q(f.emax() - 6) * ae;
    for (Fp v : {s, sp}) {
        mpq_class a = qabs(to_rational(f, v));
        if (a < lo || a > hi) return false;
    }
    return true;
}

mpq_class c3_cap(const Format& f, Fp s)
{
    mpq_class a = qabs(to_rational(f, s));
    return pow2q(f.emax() - 7) * std::min(a, pow2q(f.M + 3));
}

// exact max slope; when cap is given, stop as soon as it is exceeded
template <class Int>
std::optional<mpq_class> max_slope_t(const std::vector<Int>& ux, const std::vector<Int>& uy, size_t ie,
                                     const mpq_class* cap)
{
    auto to_mpz = [](Int v) {
        if constexpr (std::is_same_v<Int, mpz_class>) return v;
        else {
            bool neg = v < 0;
            unsigned __int128 a = neg ? (unsigned __int128)(-v) : (unsigned __int128)v;
            mpz_class r((unsigned long)(uint64_t)(a >> 64));
            r <<= 64;
            r += mpz_class((unsigned long)(uint64_t)a);
            return neg ? mpz_class(-r) : r;
        }
    };
    Int ue = ux[ie], uep = ux[ie + 1], se = uy[ie], sep = uy[ie + 1];
    Int bn = 0, bd = 1;
    mpz_class cn, cd;
    if (cap) {
        cn = cap->get_num();
        cd = cap->get_den();
    }
    // outward from eta, where slopes tend to peak
    const size_t n = ux.size();
    for (size_t step = 0; step < 2 * n; ++step) {
        size_t off = step / 2 + 1;
        size_t i;
        if (step % 2 == 0) {
            if (off > ie) continue;
            i = ie - off;
        } else {
            if (ie + 1 + off >= n) continue;
            i = ie + 1 + off;
        }
        Int num, den;
        if (i < ie) {
            num = uy[i] - se;
            den = ue - ux[i];
        } else {
            num = uy[i] - sep;
            den = ux[i] - uep;
        }
        if (num < 0) num = -num;
        if (num * bd > bn * den) {
            bn = num;
            bd = den;
            if (cap && to_mpz(bn) * cd > cn * to_mpz(bd)) return std::nullopt;
        }
    }
    mpq_class r(to_mpz(bn), to_mpz(bd));
    r.canonicalize();
    return r;
}

std::optional<mpq_class> max_slope(const Activation& act, const Tables& t, Fp eta, const mpq_class* cap)
{
    size_t ie = index_of(act.fmt(), eta);
    if (t.narrow) return max_slope_t(t.ux, t.uy, ie, cap);
    return max_slope_t(t.zx, t.zy, ie, cap);
}

void fill_relaxed(const Format& f, const Activation& act, Witness& w)
{
    Fp s = act(w.eta), sp = act(w.eta_plus);
    w.e_eta = expo(f, w.eta);
    w.e_sigma = std::max(expo(f, s), expo(f, sp));
    w.e0 = floor_log2(qabs(to_rational(f, sp) - to_rational(f, s)));
    w.e_theta = std::max(f.emin() - f.M, f.emin() - w.e0 - f.M + 1);
    bool neg_pow2 = w.eta.negative() && qabs(to_rational(f, w.eta)) == pow2q(w.e_eta);
    w.e_zeta = w.e_eta - f.M - (neg_pow2 ? 2 : 1);
}

} // namespace

std::pair<mpq_class, mpq_class> k_range(const Format& f)
{
    mpq_class e = f.eps();
    return {e / 2 + 2 * e * e, mpq_class(5, 4) - 2 * e};
}

mpq_class lambda_cap(const Format& f) { return pow2q(f.emax() - 9) / 5; }

ConditionReport check_condition(const Activation& act)
{
    const Format& f = act.fmt();
    ConditionReport rep;
    if (!act.tabulated()) {
        rep.failed = "C1";
        rep.reason = "exhaustive check needs a tabulated format (at most 2^17 finite floats)";
        return rep;
    }
    Tables t = tabulate(act);
    const size_t n = t.xs.size();

    // C1
    std::vector<size_t> zeros;
    for (size_t i = 0; i < n; ++i)
        if (t.ys[i].is_zero()) zeros.push_back(i);
    std::vector<size_t> c2s;
    for (size_t i = 0; i < n; ++i)
        if (in_k_range(f, t.ys[i])) c2s.push_back(i);
    if (zeros.empty() || c2s.empty()) {
        rep.failed = "C1";
        rep.reason = zeros.empty() ? "sigma has no zero on F" : "no c2 with |sigma(c2)| in the magnitude window";
        return rep;
    }
    mpq_class one(1);
    std::stable_sort(c2s.begin(), c2s.end(), [&](size_t a, size_t b) {
        mpq_class da = qabs(to_rational(f, t.xs[a]) - one), db = qabs(to_rational(f, t.xs[b]) - one);
        if (da != db) return da < db;
        return a > b;
    });
    const size_t izero = index_of(f, Fp::zero());
    const Fp thr = pow2(f, f.emin() + 1);
    std::optional<std::pair<Fp, Fp>> c1c2;
    for (size_t j : c2s) {
        Fp k = t.ys[j];
        Fp blo = fmin(Fp::zero(), k), bhi = fmax(Fp::zero(), k);
        auto ok = [&](size_t a, size_t b) {
            auto [lo, hi] = act.range_minmax(t.xs[a], t.xs[b]);
            return blo <= lo && hi <= bhi;
        };
        // widest [L,R] around j where sigma stays between 0 and K
        size_t L = j, R = j;
        {
            size_t lo = 0, hi = j;
            while (lo < hi) {
                size_t mid = (lo + hi) / 2;
                if (ok(mid, j)) hi = mid;
                else lo = mid + 1;
            }
            L = lo;
            lo = j, hi = n - 1;
            while (lo < hi) {
                size_t mid = (lo + hi + 1) / 2;
                if (ok(j, mid)) lo = mid;
                else hi = mid - 1;
            }
            R = lo;
        }
        bool c2_big = (t.xs[j].negative() ? -t.xs[j] : t.xs[j]) >= thr;
        // zero in [L,R] with the smallest |c1| (nonnegative first), honoring the 2^(emin+1) bound
        std::optional<size_t> best;
        mpq_class best_abs;
        auto consider = [&](size_t z) {
            if (z < L || z > R) return;
            Fp c = t.xs[z];
            Fp a = c.negative() ? -c : c;
            if (!c2_big && a < thr) return;
            mpq_class q = to_rational(f, a);
            if (!best || q < best_abs || (q == best_abs && z > *best)) {
                best = z;
                best_abs = q;
            }
        };
        size_t anchor = izero;
        if (!c2_big) {
            // first candidates at or beyond the magnitude threshold
            auto p = std::lower_bound(zeros.begin(), zeros.end(), index_of(f, thr));
            if (p != zeros.end()) consider(*p);
            auto q = std::upper_bound(zeros.begin(), zeros.end(), index_of(f, -thr));
            if (q != zeros.begin()) consider(*std::prev(q));
        }
        // nearest zeros to 0 on either side, clipped to [L,R]
        auto clip_lo = std::max(anchor, L), clip_hi = std::min(anchor, R);
        auto p = std::lower_bound(zeros.begin(), zeros.end(), clip_lo);
        if (p != zeros.end()) consider(*p);
        auto q = std::upper_bound(zeros.begin(), zeros.end(), clip_hi);
        if (q != zeros.begin()) consider(*std::prev(q));
        if (best) {
            c1c2 = {t.xs[*best], t.xs[j]};
            break;
        }
    }
    if (!c1c2) {
        rep.failed = "C1";
        rep.reason = "no (c1, c2) pair with sigma between sigma(c1)=0 and sigma(c2) on [c1,c2]";
        return rep;
    }

    // C2 and C3: eta by ascending |eta|, positive first
    std::vector<size_t> etas;
    for (size_t i = 0; i + 1 < n; ++i) {
        mpq_class a = qabs(to_rational(f, t.xs[i]));
        if (a >= pow2q(f.emin() + 5) && a <= 4 - 8 * f.eps()) etas.push_back(i);
    }
    std::stable_sort(etas.begin(), etas.end(), [&](size_t a, size_t b) {
        Fp x = t.xs[a], y = t.xs[b];
        Fp ax = x.negative() ? -x : x, ay = y.negative() ? -y : y;
        if (ax != ay) return ax < ay;
        return a > b;
    });
    bool any_c2 = false;
    std::string c3_reason = "no eta satisfying C2 admits a slope bound within the C3 cap";
    for (size_t i : etas) {
        Fp eta = t.xs[i], ep = t.xs[i + 1];
        if (!c2_magnitudes(f, eta, t.ys[i], t.ys[i + 1])) continue;
        bool inc = true;
        if (!threshold_ok(act, eta, &inc)) continue;
        any_c2 = true;
        mpq_class cap = c3_cap(f, t.ys[i]);
        auto lam = max_slope(act, t, eta, &cap);
        if (!lam) continue;
        Witness w;
        w.c1 = c1c2->first;
        w.c2 = c1c2->second;
        w.K = act(w.c2);
        w.eta = eta;
        w.eta_plus = ep;
        w.lambda = *lam;
        w.increasing = inc;
        fill_relaxed(f, act, w);
        std::string why;
        if (!verify_relaxed(act, w, &why)) {
            c3_reason = "strict witness failed relaxed form: " + why;
            continue;
        }
        rep.ok = true;
        rep.witness = w;
        return rep;
    }
    rep.failed = any_c2 ? "C3" : "C2";
    rep.reason = any_c2 ? c3_reason : "no eta with the threshold property and magnitude bounds";
    return rep;
}

bool verify_witness(const Activation& act, const Witness& w, std::string* why)
{
    const Format& f = act.fmt();
    auto fail = [&](const std::string& s) {
        if (why) *why = s;
        return false;
    };
    if (!act.tabulated()) return fail("format not tabulated");
    if (!check_c1(act, w.c1, w.c2, why)) return false;
    if (act(w.c2) != w.K) return fail("K != sigma(c2)");
    if (!w.eta.is_finite() || succ(f, w.eta) != w.eta_plus) return fail("eta+ is not succ(eta)");
    Fp s = act(w.eta), sp = act(w.eta_plus);
    if (!c2_magnitudes(f, w.eta, s, sp)) return fail("C2: magnitude bounds");
    bool inc = true;
    if (!threshold_ok(act, w.eta, &inc)) return fail("C2: threshold property");
    if (inc != w.increasing) return fail("C2: direction mismatch");
    if (w.lambda < 0 || w.lambda > c3_cap(f, s)) return fail("C3: lambda outside [0, cap]");
    Tables t = tabulate(act);
    auto lam = max_slope(act, t, w.eta, &w.lambda);
    if (!lam) return fail("C3: slope exceeds lambda");
    return true;
}

bool verify_relaxed(const Activation& act, const Witness& w, std::string* why)
{
    const Format& f = act.fmt();
    auto fail = [&](const std::string& s) {
        if (why) *why = s;
        return false;
    };
    if (!act(w.c1).is_zero()) return fail("C1+: sigma(c1) != 0");
    if (!in_k_range(f, act(w.c2))) return fail("C1+: sigma(c2) outside R");
    auto [lo, hi] = act.range_minmax(fmin(w.c1, w.c2), fmax(w.c1, w.c2));
    if (lo < fmin(Fp::zero(), w.K) || hi > fmax(Fp::zero(), w.K)) return fail("C1+: betweenness");
    if (qabs(to_rational(f, w.eta)) >= 4 - 8 * f.eps()) return fail("C2+: |eta| >= pred(4)");
    Fp s = act(w.eta), sp = act(w.eta_plus);
    int ee = expo(f, w.eta);
    if (ee < f.emin() + 5 || ee > 1) return fail("C2+: expo(eta) out of range");
    if (s.is_zero() && sp.is_zero()) return fail("C2+: sigma vanishes at eta and eta+");
    int es = std::max(s.is_zero() ? f.emin() : expo(f, s), sp.is_zero() ? f.emin() : expo(f, sp));
    if (es < f.emin() + 5 || es > ee + f.emax() - 5) return fail("C2+: expo(sigma) out of range");
    bool inc = true;
    if (!threshold_ok(act, w.eta, &inc)) return fail("C2+: threshold property");
    mpq_class cap = pow2q(f.emax() - 6) * pow2q(std::min(es, f.M + 2));
    if (w.lambda > cap) return fail("C3+: lambda above cap");
    if (w.e_eta != ee || w.e_sigma != es) return fail("relaxed byproducts stale");
    return true;
}

std::string decimal(const mpq_class& q, int max_digits)
{
    std::string out;
    mpq_class a = q;
    if (a < 0) {
        out = "-";
        a = -a;
    }
    mpz_class ip = a.get_num() / a.get_den();
    mpz_class rem = a.get_num() - ip * a.get_den();
    out += ip.get_str();
    if (rem == 0) return out;
    out += ".";
    const mpz_class& d = a.get_den();
    for (int i = 0; i < max_digits && rem != 0; ++i) {
        rem *= 10;
        mpz_class digit = rem / d;
        out += digit.get_str();
        rem -= digit * d;
    }
    if (rem != 0) out += "...";
    return out;
}

std::string sci(const mpq_class& q, int sig)
{
    if (q == 0) return "0";
    mpq_class a = qabs(q);
    // decimal exponent: largest k with 10^k <= a
    int k = 0;
    mpq_class p(1);
    while (p * 10 <= a) {
        p *= 10;
        ++k;
    }
    while (p > a) {
        p /= 10;
        --k;
    }
    mpq_class m = a / p; // in [1,10)
    mpz_class scale = 1;
    for (int i = 1; i < sig; ++i) scale *= 10;
    mpq_class sm = m * scale;
    // round half up to sig digits
    mpz_class r = (sm.get_num() * 2 + sm.get_den()) / (sm.get_den() * 2);
    if (r >= scale * 10) {
        r /= 10;
        ++k;
    }
    std::string digits = r.get_str();
    std::string s = q < 0 ? "-" : "";
    s += digits.substr(0, 1);
    if (digits.size() > 1) s += "." + digits.substr(1);
    s += "e" + std::to_string(k);
    return s;
}

std::string witness_text(const Format& f, const Witness& w)
{
    std::ostringstream o;
    auto line = [&](const char* name, Fp x) { o << "  " << name << " = " << show(f, x) << "  (" << encode(f, x) << ")\n"; };
    line("c1", w.c1);
    line("c2", w.c2);
    line("K", w.K);
    line("eta", w.eta);
    line("eta+", w.eta_plus);
    o << "  lambda = " << decimal(w.lambda, 12) << "\n";
    o << "  direction = " << (w.increasing ? "increasing" : "decreasing") << "\n";
    o << "  expo(eta) = " << w.e_eta << ", expo(sigma) = " << w.e_sigma << ", e0 = " << w.e0
      << ", e_theta = " << w.e_theta << ", e_zeta = " << w.e_zeta << "\n";
    return o.str();
}

std::string condition_table_report(const Format& f)
{
    std::ostringstream o;
    auto [lo, hi] = k_range(f);
    o << "format " << f.name() << "  E=" << f.E << " M=" << f.M << "\n";
    o << "  -Omega           < -2^" << f.emax() << "\n";
    o << "  range            [" << decimal(lo) << ", " << decimal(hi) << "]\n";
    o << "  omega/2          " << sci(f.omega() / 2) << "\n";
    o << "  lambda cap       " << decimal(lambda_cap(f), 6) << "\n";
    o << "activation  verdict  c1            c2            K             eta           lambda\n";
    for (const auto& name : Activation::names()) {
        auto act = Activation::make(f, name);
        o << "  ";
        o.width(10);
        o << std::left << name << " ";
        if (!act->tabulated()) {
            o << "skipped (format too large for an exhaustive check)\n";
            continue;
        }
        ConditionReport r;
        try {
            r = check_condition(*act);
        } catch (const RoundingUndecided& e) {
            o << "undecided (" << e.what() << ")\n";
            continue;
        }
        if (!r.ok) {
            o << "FAIL " << r.failed << ": " << r.reason << "\n";
            continue;
        }
        const Witness& w = *r.witness;
        auto col = [&](const std::string& s) {
            o.width(13);
            o << std::left << s << " ";
        };
        o << "PASS     ";
        col(show(f, w.c1));
        col(show(f, w.c2));
        col(show(f, w.K));
        col(show(f, w.eta));
        o << decimal(w.lambda, 8) << "\n";
    }
    return o.str();
}

} // namespace fpiua

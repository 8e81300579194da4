#include "fpiua/activation.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include <mpfr.h>

namespace fpiua {

namespace {

const std::vector<std::string> kNames = {"relu", "leakyrelu", "gelu", "elu", "mish",
                                         "softplus", "sigmoid", "tanh", "identity"};

bool is_monotone(const std::string& n) { return n != "gelu" && n != "mish"; }

// closed enclosure [lo, hi] with directed rounding
struct Encl {
    mpfr_t lo, hi;
    explicit Encl(mpfr_prec_t p)
    {
        mpfr_init2(lo, p);
        mpfr_init2(hi, p);
    }
    ~Encl()
    {
        mpfr_clear(lo);
        mpfr_clear(hi);
    }
    Encl(const Encl&) = delete;
    Encl& operator=(const Encl&) = delete;
};

using Mono = int (*)(mpfr_ptr, mpfr_srcptr, mpfr_rnd_t);

void apply_inc(Encl& r, const Encl& a, Mono fn)
{
    fn(r.lo, a.lo, MPFR_RNDD);
    fn(r.hi, a.hi, MPFR_RNDU);
}

void mul(Encl& r, const Encl& a, const Encl& b, mpfr_prec_t p)
{
    mpfr_t c[4][2];
    const mpfr_ptr xs[2] = {const_cast<mpfr_ptr>(a.lo), const_cast<mpfr_ptr>(a.hi)};
    const mpfr_ptr ys[2] = {const_cast<mpfr_ptr>(b.lo), const_cast<mpfr_ptr>(b.hi)};
    for (int i = 0; i < 4; ++i) {
        mpfr_init2(c[i][0], p);
        mpfr_init2(c[i][1], p);
        mpfr_mul(c[i][0], xs[i / 2], ys[i % 2], MPFR_RNDD);
        mpfr_mul(c[i][1], xs[i / 2], ys[i % 2], MPFR_RNDU);
    }
    mpfr_set(r.lo, c[0][0], MPFR_RNDD);
    mpfr_set(r.hi, c[0][1], MPFR_RNDU);
    for (int i = 1; i < 4; ++i) {
        mpfr_min(r.lo, r.lo, c[i][0], MPFR_RNDD);
        mpfr_max(r.hi, r.hi, c[i][1], MPFR_RNDU);
    }
    for (auto& ci : c) {
        mpfr_clear(ci[0]);
        mpfr_clear(ci[1]);
    }
}

int softplus_fn(mpfr_ptr r, mpfr_srcptr a, mpfr_rnd_t d)
{
    // increasing composition; directed rounding at both steps keeps it an enclosure
    mpfr_t t;
    mpfr_init2(t, mpfr_get_prec(r) + 8);
    mpfr_exp(t, a, d);
    mpfr_log1p(r, t, d);
    mpfr_clear(t);
    return 0;
}

int sigmoid_fn(mpfr_ptr r, mpfr_srcptr a, mpfr_rnd_t d)
{
    // 1/(1+exp(-a)), increasing in a
    mpfr_rnd_t opp = d == MPFR_RNDD ? MPFR_RNDU : MPFR_RNDD;
    mpfr_t t;
    mpfr_init2(t, mpfr_get_prec(r) + 8);
    mpfr_neg(t, a, MPFR_RNDN);
    mpfr_exp(t, t, opp);
    mpfr_add_ui(t, t, 1, opp);
    mpfr_ui_div(r, 1, t, d);
    mpfr_clear(t);
    return 0;
}

void set_exact(Encl& e, const Format& f, Fp x)
{
    Parts p = parts(f, x);
    mpz_class m(std::to_string(p.m));
    if (p.neg) m = -m;
    mpfr_set_z_2exp(e.lo, m.get_mpz_t(), p.e - f.M, MPFR_RNDN);
    mpfr_set(e.hi, e.lo, MPFR_RNDN);
}

void eval_encl(const std::string& n, Encl& out, const Encl& x, mpfr_prec_t p)
{
    if (n == "tanh") {
        apply_inc(out, x, mpfr_tanh);
    } else if (n == "sigmoid") {
        apply_inc(out, x, sigmoid_fn);
    } else if (n == "softplus") {
        apply_inc(out, x, softplus_fn);
    } else if (n == "elu") {
        // x <= 0 here
        apply_inc(out, x, mpfr_expm1);
    } else if (n == "gelu") {
        // x/2 erfc(-x / sqrt 2); erfc avoids the cancellation in 1 + erf for x << 0
        Encl s(p), inv(p), t(p), u(p);
        mpfr_sqrt_ui(s.lo, 2, MPFR_RNDD);
        mpfr_sqrt_ui(s.hi, 2, MPFR_RNDU);
        mpfr_si_div(inv.lo, -1, s.lo, MPFR_RNDD);
        mpfr_si_div(inv.hi, -1, s.hi, MPFR_RNDU);
        mul(t, x, inv, p);
        // erfc is decreasing
        mpfr_erfc(u.lo, t.hi, MPFR_RNDD);
        mpfr_erfc(u.hi, t.lo, MPFR_RNDU);
        mul(out, x, u, p);
        mpfr_div_2ui(out.lo, out.lo, 1, MPFR_RNDD);
        mpfr_div_2ui(out.hi, out.hi, 1, MPFR_RNDU);
    } else if (n == "mish") {
        Encl s(p), t(p);
        apply_inc(s, x, softplus_fn);
        apply_inc(t, s, mpfr_tanh);
        mul(out, x, t, p);
    } else {
        throw Error("no enclosure for activation " + n);
    }
}

Fp round_mpfr(const Format& f, mpfr_srcptr v)
{
    if (mpfr_zero_p(v)) return Fp::zero();
    mpz_class m;
    long e = mpfr_get_z_2exp(m.get_mpz_t(), v);
    return round_mpz(f, m, e);
}

Fp limit_at(const std::string& n, const Format& f, bool pos)
{
    if (n == "relu" || n == "softplus") return pos ? Fp::pos_inf() : Fp::zero();
    if (n == "gelu" || n == "mish") return pos ? Fp::pos_inf() : Fp::zero();
    if (n == "leakyrelu" || n == "identity") return pos ? Fp::pos_inf() : Fp::neg_inf();
    if (n == "elu") return pos ? Fp::pos_inf() : from_int(f, -1);
    if (n == "sigmoid") return pos ? from_int(f, 1) : Fp::zero();
    if (n == "tanh") return from_int(f, pos ? 1 : -1);
    throw Error("unknown activation " + n);
}

} // namespace

Fp correctly_rounded(const Format& f, const std::string& n, Fp x)
{
    if (x.is_nan()) return x;
    if (x.is_inf()) return limit_at(n, f, x.c > 0);
    if (n == "identity") return x;
    if (n == "relu") return x.negative() ? Fp::zero() : x;
    if (n == "leakyrelu") return x.negative() ? round(f, to_rational(f, x) / 100) : x;
    if (n == "elu" && !x.negative()) return x;
    if (x.is_zero()) {
        if (n == "sigmoid") return round(f, mpq_class(1, 2));
        if (n != "softplus") return Fp::zero();
    }
    for (mpfr_prec_t p : {64, 128, 256}) {
        Encl in(p), out(p);
        set_exact(in, f, x);
        eval_encl(n, out, in, p);
        Fp a = round_mpfr(f, out.lo), b = round_mpfr(f, out.hi);
        if (a == b) return a;
    }
    throw RoundingUndecided("rounding undecided for " + n + " at " + encode(f, x));
}

double real_activation(const std::string& n, double x)
{
    if (n == "identity") return x;
    if (n == "relu") return x > 0 ? x : 0;
    if (n == "leakyrelu") return x > 0 ? x : 0.01 * x;
    if (n == "elu") return x > 0 ? x : std::expm1(x);
    if (n == "sigmoid") return 1 / (1 + std::exp(-x));
    if (n == "tanh") return std::tanh(x);
    if (n == "softplus") return std::log1p(std::exp(x));
    if (n == "gelu") return 0.5 * x * (1 + std::erf(x / std::sqrt(2.0)));
    if (n == "mish") return x * std::tanh(std::log1p(std::exp(x)));
    throw Error("unknown activation " + n);
}

const std::vector<std::string>& Activation::names() { return kNames; }

std::shared_ptr<const Activation> Activation::make(const Format& f, const std::string& name)
{
    bool known = false;
    for (auto& n : kNames) known = known || n == name;
    if (!known) throw Error("unknown activation '" + name + "'");
    static std::mutex mu;
    static std::map<std::tuple<int, int, std::string>, std::shared_ptr<const Activation>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(f.E, f.M, name);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    std::shared_ptr<Activation> a(new Activation(f, name));
    a->monotone_ = is_monotone(name);
    a->at_neg_inf_ = limit_at(name, f, false);
    a->at_pos_inf_ = limit_at(name, f, true);
    a->tabulate();
    cache[key] = a;
    return a;
}

std::shared_ptr<const Activation> Activation::custom(const Format& f, const std::string& name, const FpFn& fn,
                                                     bool monotone)
{
    std::shared_ptr<Activation> a(new Activation(f, name));
    a->custom_ = fn;
    a->monotone_ = monotone;
    a->at_neg_inf_ = fn(Fp::neg_inf());
    a->at_pos_inf_ = fn(Fp::pos_inf());
    a->tabulate();
    return a;
}

Fp Activation::compute(Fp x) const
{
    if (custom_) return custom_(x);
    return correctly_rounded(f_, name_, x);
}

void Activation::tabulate()
{
    int64_t mo = f_.max_ord();
    if (mo > (int64_t(1) << 16)) return;
    size_t n = size_t(2 * mo + 1);
    table_.resize(n);
    for (size_t i = 0; i < n; ++i) table_[i] = compute(Fp(int64_t(i) - mo));
    if (monotone_) return;
    smin_.assign(1, table_);
    smax_.assign(1, table_);
    for (size_t k = 1; (size_t(1) << k) <= n; ++k) {
        size_t len = n - (size_t(1) << k) + 1, h = size_t(1) << (k - 1);
        std::vector<Fp> a(len), b(len);
        for (size_t i = 0; i < len; ++i) {
            a[i] = fmin(smin_[k - 1][i], smin_[k - 1][i + h]);
            b[i] = fmax(smax_[k - 1][i], smax_[k - 1][i + h]);
        }
        smin_.push_back(std::move(a));
        smax_.push_back(std::move(b));
    }
}

Fp Activation::operator()(Fp x) const
{
    if (x.is_nan()) return custom_ ? custom_(x) : x;
    if (x.c == Fp::kInf) return at_pos_inf_;
    if (x.c == -Fp::kInf) return at_neg_inf_;
    if (!table_.empty()) return table_[size_t(x.c + f_.max_ord())];
    return compute(x);
}

std::pair<Fp, Fp> Activation::range_minmax(Fp lo, Fp hi) const
{
    int64_t mo = f_.max_ord();
    size_t i = size_t(lo.c + mo), j = size_t(hi.c + mo);
    if (monotone_) {
        Fp a = table_[i], b = table_[j];
        return {fmin(a, b), fmax(a, b)};
    }
    size_t len = j - i + 1;
    int k = 63 - __builtin_clzll(len);
    size_t h = size_t(1) << k;
    return {fmin(smin_[k][i], smin_[k][j + 1 - h]), fmax(smax_[k][i], smax_[k][j + 1 - h])};
}

Interval Activation::lift(const Interval& x) const
{
    if (x.top) return x;
    Fp lo = Fp::pos_inf(), hi = Fp::neg_inf();
    auto take = [&](Fp v) {
        lo = fmin(lo, v);
        hi = fmax(hi, v);
    };
    bool nan = false;
    if (x.lo.c == -Fp::kInf) {
        nan |= at_neg_inf_.is_nan();
        take(at_neg_inf_);
    }
    if (x.hi.c == Fp::kInf) {
        nan |= at_pos_inf_.is_nan();
        take(at_pos_inf_);
    }
    int64_t mo = f_.max_ord();
    Fp a = x.lo.c == -Fp::kInf ? Fp(-mo) : x.lo;
    Fp b = x.hi.c == Fp::kInf ? Fp(mo) : x.hi;
    if (a <= b && !(x.lo.is_inf() && x.lo == x.hi)) {
        if (!table_.empty()) {
            auto [mn, mx] = range_minmax(a, b);
            take(mn);
            take(mx);
        } else if (monotone_) {
            take((*this)(a));
            take((*this)(b));
        } else {
            Interval r = iv_lift_exhaustive(f_, [this](Fp v) { return (*this)(v); }, Interval(a, b));
            if (r.top) return r;
            take(r.lo);
            take(r.hi);
        }
    }
    if (nan || lo.is_nan() || hi.is_nan()) return Interval::top_value();
    return Interval(lo, hi);
}

} // namespace fpiua

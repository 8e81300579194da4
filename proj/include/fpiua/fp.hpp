#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace fpiua {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// (E, M) parameterization. Everything else is derived on demand.
struct Format {
    int E = 5;
    int M = 3;

    Format() = default;
    Format(int e, int m, bool relaxed = false);

    int emin() const { return -(1 << (E - 1)) + 2; }
    int emax() const { return (1 << (E - 1)) - 1; }
    // ordinal of the largest finite float; finite ordinals lie in [-max_ord, max_ord]
    int64_t max_ord() const { return int64_t(emax() - emin()) * (int64_t(1) << M) + (int64_t(1) << (M + 1)) - 1; }
    int64_t finite_count() const { return 2 * max_ord() + 1; }

    mpq_class omega() const;     // 2^(emin-M)
    mpq_class big_omega() const; // 2^emax (2 - 2^-M)
    mpq_class eps() const;       // 2^(-M-1)
    mpq_class overflow_c() const;

    bool strict = true; // satisfies E >= 5, 3 <= M <= 2^(E-1)
    std::string name() const { return "E" + std::to_string(E) + "M" + std::to_string(M); }
    static Format parse(const std::string& s);

    bool operator==(const Format& o) const { return E == o.E && M == o.M; }
};

// A float of some Format, stored as a signed ordinal: consecutive floats have
// consecutive codes, zero is 0, the infinities are +-kInf, NaN is kNaN.
// The meaning of a code depends on the Format it is used with.
struct Fp {
    static constexpr int64_t kInf = int64_t(1) << 62;
    static constexpr int64_t kNaN = INT64_MIN;

    int64_t c = 0;

    constexpr Fp() = default;
    constexpr explicit Fp(int64_t code) : c(code) {}

    static constexpr Fp zero() { return Fp(0); }
    static constexpr Fp pos_inf() { return Fp(kInf); }
    static constexpr Fp neg_inf() { return Fp(-kInf); }
    static constexpr Fp nan() { return Fp(kNaN); }

    bool is_nan() const { return c == kNaN; }
    bool is_inf() const { return c == kInf || c == -kInf; }
    bool is_finite() const { return !is_nan() && !is_inf(); }
    bool is_zero() const { return c == 0; }
    bool negative() const { return c < 0 && c != kNaN; }

    Fp operator-() const { return is_nan() ? *this : Fp(-c); }

    friend bool operator==(Fp a, Fp b) { return a.c == b.c; }
    friend bool operator!=(Fp a, Fp b) { return a.c != b.c; }
    // total order on non-NaN values; callers must not compare NaN
    friend bool operator<(Fp a, Fp b) { return a.c < b.c; }
    friend bool operator<=(Fp a, Fp b) { return a.c <= b.c; }
    friend bool operator>(Fp a, Fp b) { return a.c > b.c; }
    friend bool operator>=(Fp a, Fp b) { return a.c >= b.c; }
};

inline Fp fmin(Fp a, Fp b) { return a.c < b.c ? a : b; }
inline Fp fmax(Fp a, Fp b) { return a.c < b.c ? b : a; }

struct Parts {
    bool neg;
    int e;
    uint64_t m;
};

// sign/exponent/significand of a finite value; value = (-1)^neg m 2^(e-M)
Parts parts(const Format& f, Fp x);
Fp from_parts(const Format& f, bool neg, int e, uint64_t m);

// ExtReal: an exact rational, or an infinity
struct ExtReal {
    int inf = 0; // -1, 0, +1
    mpq_class q;
    ExtReal() = default;
    ExtReal(const mpq_class& v) : q(v) {}
    static ExtReal pos_inf() { ExtReal r; r.inf = 1; return r; }
    static ExtReal neg_inf() { ExtReal r; r.inf = -1; return r; }
};

Fp round(const Format& f, const ExtReal& x);
Fp round(const Format& f, const mpq_class& x);
// round neg * N * 2^k
Fp round_dyadic(const Format& f, bool neg, unsigned __int128 n, int k);
Fp round_mpz(const Format& f, const mpz_class& n, long k);

mpq_class to_rational(const Format& f, Fp x); // finite only
double to_double(const Format& f, Fp x);      // display only
Fp from_int(const Format& f, long v);
Fp pow2(const Format& f, int k); // round(2^k)

Fp add(const Format& f, Fp x, Fp y);
Fp sub(const Format& f, Fp x, Fp y);
Fp mul(const Format& f, Fp x, Fp y);
Fp sum_left_assoc(const Format& f, const std::vector<Fp>& xs);

Fp succ(const Format& f, Fp x);
Fp pred(const Format& f, Fp x);

struct Decomposed {
    int e;
    mpq_class m;
    std::vector<int> digits;
};
Decomposed decompose(const Format& f, Fp x);
// exponent e_x = max(floor(log2|x|), emin), finite only
int expo(const Format& f, Fp x);

std::vector<Fp> enumerate(const Format& f, Fp lo, Fp hi);
Fp largest(const Format& f);  // Omega
Fp smallest(const Format& f); // omega

std::string encode(const Format& f, Fp x);
Fp decode(const Format& f, const std::string& s);
std::string show(const Format& f, Fp x); // decimal, human readable

// Lookup tables for small formats. Indexing is by code + max_ord + 1, with
// slot 0 for -inf, the last-but-one for +inf and the last for NaN.
struct OpTables {
    int64_t span;
    std::vector<int32_t> add, mul;
    int idx(Fp x) const
    {
        if (x.is_nan()) return int(span - 1);
        if (x.c == Fp::kInf) return int(span - 2);
        if (x.c == -Fp::kInf) return 0;
        return int(x.c + (span - 3) / 2 + 1);
    }
    Fp val(int32_t i) const
    {
        if (i == span - 1) return Fp::nan();
        if (i == span - 2) return Fp::pos_inf();
        if (i == 0) return Fp::neg_inf();
        return Fp(int64_t(i) - (span - 3) / 2 - 1);
    }
};
// nullptr when the format is too large to tabulate
const OpTables* op_tables(const Format& f);

// Arithmetic context: table lookups when available, exact integer path otherwise.
class Arith {
public:
    explicit Arith(const Format& f) : f_(f), t_(op_tables(f)) {}
    const Format& fmt() const { return f_; }
    Fp add(Fp x, Fp y) const
    {
        if (t_) return Fp(t_->val(t_->add[size_t(t_->idx(x)) * t_->span + t_->idx(y)]));
        return fpiua::add(f_, x, y);
    }
    Fp mul(Fp x, Fp y) const
    {
        if (t_) return Fp(t_->val(t_->mul[size_t(t_->idx(x)) * t_->span + t_->idx(y)]));
        return fpiua::mul(f_, x, y);
    }
    Fp sub(Fp x, Fp y) const { return add(x, -y); }

private:
    Format f_;
    const OpTables* t_;
};

} // namespace fpiua

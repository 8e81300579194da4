#include "fpiua/fp.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

namespace fpiua {

namespace {

using u128 = unsigned __int128;
using i128 = __int128;

int bitlen(u128 n)
{
    int l = 0;
    uint64_t hi = uint64_t(n >> 64);
    if (hi) {
        l = 64;
        n = hi;
    }
    uint64_t lo = uint64_t(n);
    return l + (lo ? 64 - __builtin_clzll(lo) : 0);
}

mpq_class pow2q(long k)
{
    mpq_class r(1);
    if (k >= 0)
        mpz_mul_2exp(r.get_num_mpz_t(), r.get_num_mpz_t(), k);
    else
        mpz_mul_2exp(r.get_den_mpz_t(), r.get_den_mpz_t(), -k);
    return r;
}

int64_t ord_of(const Format& f, int e, uint64_t m)
{
    if (e == f.emin()) return int64_t(m);
    return int64_t(e - f.emin()) * (int64_t(1) << f.M) + int64_t(m);
}

} // namespace

Format::Format(int e, int m, bool relaxed) : E(e), M(m)
{
    if (E < 2 || E > 11 || M < 1 || M > 52) throw Error("unsupported format " + name());
    strict = E >= 5 && M >= 3 && M <= (1 << (E - 1));
    if (!strict && !relaxed) throw Error("format " + name() + " violates E>=5, 3<=M<=2^(E-1)");
}

Format Format::parse(const std::string& s)
{
    int e = 0, m = 0;
    char tail = 0;
    if (std::sscanf(s.c_str(), "E%dM%d%c", &e, &m, &tail) != 2) throw Error("bad format string '" + s + "'");
    return Format(e, m);
}

mpq_class Format::omega() const { return pow2q(emin() - M); }
mpq_class Format::big_omega() const { return pow2q(emax()) * (mpq_class(2) - pow2q(-M)); }
mpq_class Format::eps() const { return pow2q(-M - 1); }
mpq_class Format::overflow_c() const { return pow2q(emax()) * eps(); }

Parts parts(const Format& f, Fp x)
{
    if (!x.is_finite()) throw Error("parts of non-finite value");
    uint64_t o = uint64_t(x.c < 0 ? -x.c : x.c);
    Parts p{x.c < 0, f.emin(), o};
    uint64_t top = uint64_t(1) << (f.M + 1);
    if (o >= top) {
        uint64_t hi = o >> f.M;
        p.e = f.emin() + int(hi) - 1;
        p.m = (o & ((uint64_t(1) << f.M) - 1)) | (uint64_t(1) << f.M);
    }
    return p;
}

Fp from_parts(const Format& f, bool neg, int e, uint64_t m)
{
    if (e < f.emin() || e > f.emax() || m >= (uint64_t(1) << (f.M + 1)) || (e > f.emin() && m < (uint64_t(1) << f.M)))
        throw Error("non-canonical float parts");
    if (m == 0 && neg) throw Error("negative zero is not modelled");
    int64_t o = ord_of(f, e, m);
    return Fp(neg ? -o : o);
}

Fp round_dyadic(const Format& f, bool neg, u128 n, int k)
{
    if (n == 0) return Fp::zero();
    int L = bitlen(n);
    int e = k + L - 1;
    if (e < f.emin()) e = f.emin();
    if (e > f.emax() + 1) return neg ? Fp::neg_inf() : Fp::pos_inf();
    int q = e - f.M;
    int shift = q - k;
    u128 m;
    if (shift <= 0) {
        m = n << (-shift);
    } else if (shift > L) {
        m = 0;
    } else {
        m = shift >= 128 ? 0 : n >> shift;
        u128 rem = n - (m << shift);
        u128 half = u128(1) << (shift - 1);
        if (rem > half || (rem == half && (m & 1))) ++m;
    }
    if (m == (u128(1) << (f.M + 1))) {
        m >>= 1;
        ++e;
    }
    if (e > f.emax()) return neg ? Fp::neg_inf() : Fp::pos_inf();
    if (m == 0) return Fp::zero();
    int64_t o = ord_of(f, e, uint64_t(m));
    return Fp(neg ? -o : o);
}

Fp round_mpz(const Format& f, const mpz_class& n, long k)
{
    if (n == 0) return Fp::zero();
    bool neg = n < 0;
    mpz_class a = abs(n);
    long L = long(mpz_sizeinbase(a.get_mpz_t(), 2));
    long e = k + L - 1;
    if (e > f.emax() + 1) return neg ? Fp::neg_inf() : Fp::pos_inf();
    if (e < f.emin()) e = f.emin();
    long shift = (e - f.M) - k;
    if (shift <= 0) {
        // exact; fits in M+1 bits
        mpz_class m = a << (-shift);
        return round_dyadic(f, neg, u128(m.get_ui()), int(k + shift));
    }
    if (shift > L) return Fp::zero();
    mpz_class m = a >> shift;
    mpz_class rem = a - (m << shift);
    mpz_class half = mpz_class(1) << (shift - 1);
    int cmp = ::cmp(rem, half);
    if (cmp > 0 || (cmp == 0 && mpz_odd_p(m.get_mpz_t()))) ++m;
    return round_dyadic(f, neg, u128(m.get_ui()), int(e - f.M));
}

Fp round(const Format& f, const mpq_class& x)
{
    if (x == 0) return Fp::zero();
    bool neg = x < 0;
    mpz_class num = abs(x.get_num());
    const mpz_class& den = x.get_den();
    long nb = long(mpz_sizeinbase(num.get_mpz_t(), 2));
    long db = long(mpz_sizeinbase(den.get_mpz_t(), 2));
    // floor(log2 x) is nb-db or nb-db-1
    long e = nb - db;
    mpq_class ax = abs(x);
    if (ax < pow2q(e)) --e;
    if (e > f.emax() + 1) return neg ? Fp::neg_inf() : Fp::pos_inf();
    if (e < f.emin()) e = f.emin();
    long q = e - f.M;
    mpq_class scaled = ax * pow2q(-q);
    mpz_class m = scaled.get_num() / scaled.get_den();
    mpz_class rem2 = 2 * (scaled.get_num() - m * scaled.get_den());
    int cmp = ::cmp(rem2, scaled.get_den());
    if (cmp > 0 || (cmp == 0 && mpz_odd_p(m.get_mpz_t()))) ++m;
    return round_dyadic(f, neg, u128(m.get_ui()), int(q));
}

Fp round(const Format& f, const ExtReal& x)
{
    if (x.inf > 0) return Fp::pos_inf();
    if (x.inf < 0) return Fp::neg_inf();
    return round(f, x.q);
}

mpq_class to_rational(const Format& f, Fp x)
{
    Parts p = parts(f, x);
    mpq_class r(mpz_class(std::to_string(p.m)));
    r *= pow2q(p.e - f.M);
    return p.neg ? mpq_class(-r) : r;
}

double to_double(const Format& f, Fp x)
{
    if (x.is_nan()) return std::nan("");
    if (x.is_inf()) return x.c > 0 ? HUGE_VAL : -HUGE_VAL;
    Parts p = parts(f, x);
    double v = std::ldexp(double(p.m), p.e - f.M);
    return p.neg ? -v : v;
}

Fp from_int(const Format& f, long v) { return round(f, mpq_class(v)); }

Fp pow2(const Format& f, int k) { return round(f, pow2q(k)); }

Fp add(const Format& f, Fp x, Fp y)
{
    if (x.is_nan() || y.is_nan()) return Fp::nan();
    if (x.is_inf() || y.is_inf()) {
        if (x.is_inf() && y.is_inf() && x != y) return Fp::nan();
        return x.is_inf() ? x : y;
    }
    if (x.is_zero()) return y;
    if (y.is_zero()) return x;
    Parts a = parts(f, x), b = parts(f, y);
    if (a.e < b.e) std::swap(a, b);
    int d = a.e - b.e;
    // b is far below half an ulp of a, and a is normal: result is a
    if (d > f.M + 3) return from_parts(f, a.neg, a.e, a.m);
    i128 s = i128(a.m) << d;
    s = a.neg ? -s : s;
    s += b.neg ? -i128(b.m) : i128(b.m);
    if (s == 0) return Fp::zero();
    return round_dyadic(f, s < 0, u128(s < 0 ? -s : s), b.e - f.M);
}

Fp sub(const Format& f, Fp x, Fp y) { return add(f, x, -y); }

Fp mul(const Format& f, Fp x, Fp y)
{
    if (x.is_nan() || y.is_nan()) return Fp::nan();
    if (x.is_inf() || y.is_inf()) {
        if (x.is_zero() || y.is_zero()) return Fp::nan();
        return (x.negative() != y.negative()) ? Fp::neg_inf() : Fp::pos_inf();
    }
    if (x.is_zero() || y.is_zero()) return Fp::zero();
    Parts a = parts(f, x), b = parts(f, y);
    u128 n = u128(a.m) * u128(b.m);
    return round_dyadic(f, a.neg != b.neg, n, a.e + b.e - 2 * f.M);
}

Fp sum_left_assoc(const Format& f, const std::vector<Fp>& xs)
{
    if (xs.empty()) return Fp::zero();
    Fp acc = xs[0];
    for (size_t i = 1; i < xs.size(); ++i) acc = add(f, acc, xs[i]);
    return acc;
}

Fp succ(const Format& f, Fp x)
{
    if (x.is_nan()) throw Error("succ of NaN");
    if (x.c == Fp::kInf) throw Error("succ of +inf");
    if (x.c == -Fp::kInf) return Fp(-f.max_ord());
    if (x.c == f.max_ord()) return Fp::pos_inf();
    return Fp(x.c + 1);
}

Fp pred(const Format& f, Fp x)
{
    if (x.is_nan()) throw Error("pred of NaN");
    if (x.c == -Fp::kInf) throw Error("pred of -inf");
    if (x.c == Fp::kInf) return Fp(f.max_ord());
    if (x.c == -f.max_ord()) return Fp::neg_inf();
    return Fp(x.c - 1);
}

int expo(const Format& f, Fp x) { return parts(f, x).e; }

Decomposed decompose(const Format& f, Fp x)
{
    if (!x.is_finite()) throw Error("decompose of non-finite value");
    Parts p = parts(f, x);
    Decomposed d;
    d.e = p.e;
    d.m = mpq_class(mpz_class(std::to_string(p.m))) * pow2q(-f.M);
    for (int i = f.M; i >= 0; --i) d.digits.push_back(int((p.m >> i) & 1));
    return d;
}

std::vector<Fp> enumerate(const Format& f, Fp lo, Fp hi)
{
    if (lo.is_nan() || hi.is_nan()) throw Error("enumerate with NaN bound");
    std::vector<Fp> out;
    if (hi < lo) return out;
    Fp x = lo;
    while (true) {
        out.push_back(x);
        if (x == hi) break;
        x = succ(f, x);
    }
    return out;
}

Fp largest(const Format& f) { return Fp(f.max_ord()); }
Fp smallest(const Format&) { return Fp(1); }

std::string encode(const Format& f, Fp x)
{
    if (x.is_nan()) return "nan";
    if (x.c == Fp::kInf) return "+inf";
    if (x.c == -Fp::kInf) return "-inf";
    Parts p = parts(f, x);
    return std::string(p.neg ? "-" : "+") + ":" + std::to_string(p.e) + ":" + std::to_string(p.m);
}

Fp decode(const Format& f, const std::string& s)
{
    if (s == "nan") return Fp::nan();
    if (s == "+inf" || s == "inf") return Fp::pos_inf();
    if (s == "-inf") return Fp::neg_inf();
    if (s.size() < 5 || (s[0] != '+' && s[0] != '-') || s[1] != ':') throw Error("bad float encoding '" + s + "'");
    size_t c2 = s.find(':', 2);
    if (c2 == std::string::npos) throw Error("bad float encoding '" + s + "'");
    try {
        size_t used = 0;
        int e = std::stoi(s.substr(2, c2 - 2), &used);
        if (used != c2 - 2) throw Error("");
        std::string ms = s.substr(c2 + 1);
        if (ms.empty() || ms.find_first_not_of("0123456789") != std::string::npos) throw Error("");
        uint64_t m = std::stoull(ms);
        return from_parts(f, s[0] == '-', e, m);
    } catch (const std::exception&) {
        throw Error("bad float encoding '" + s + "' for " + f.name());
    }
}

std::string show(const Format& f, Fp x)
{
    if (!x.is_finite()) return encode(f, x);
    std::ostringstream os;
    os.precision(17);
    os << to_double(f, x);
    return os.str();
}

const OpTables* op_tables(const Format& f)
{
    if (f.max_ord() > 1100) return nullptr;
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::unique_ptr<OpTables>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{f.E, f.M}];
    if (!slot) {
        auto t = std::make_unique<OpTables>();
        t->span = 2 * f.max_ord() + 1 + 3;
        size_t n = size_t(t->span);
        t->add.resize(n * n);
        t->mul.resize(n * n);
        for (size_t i = 0; i < n; ++i) {
            Fp x = t->val(int32_t(i));
            for (size_t j = 0; j < n; ++j) {
                Fp y = t->val(int32_t(j));
                t->add[i * n + j] = t->idx(add(f, x, y));
                t->mul[i * n + j] = t->idx(mul(f, x, y));
            }
        }
        slot = std::move(t);
    }
    return slot.get();
}

} // namespace fpiua

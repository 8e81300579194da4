#include "fpiua/oracle.hpp"

#include <algorithm>
#include <mutex>
#include <random>

#include "fpiua/parallel.hpp"

namespace fpiua {

namespace {

std::string box_text(const Format& f, const Box& b)
{
    std::string s;
    for (size_t i = 0; i < b.size(); ++i) s += (i ? "x" : "") + to_string(f, b[i]);
    return s;
}

std::string vec_text(const Format& f, const std::vector<Fp>& v)
{
    std::string s = "(";
    for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + (v[i].is_nan() ? std::string("NaN") : encode(f, v[i]));
    return s + ")";
}

// runs check(i) -> failure text or "" over n items, keeping the lowest failing index
OracleReport run_checks(size_t n, const std::function<std::string(size_t)>& check)
{
    OracleReport r;
    r.checked = n;
    std::mutex mu;
    size_t first = n;
    parallel_for(n, [&](size_t i) {
        std::string why = check(i);
        if (why.empty()) return;
        std::lock_guard<std::mutex> lock(mu);
        ++r.failures;
        if (i < first) {
            first = i;
            r.first_failure = why;
        }
    });
    return r;
}

// grid index ranges of a box
std::vector<std::pair<size_t, size_t>> index_box(const Table& t, const Box& b)
{
    if (b.size() != t.dim) throw Error("oracle: box dimension differs from the table");
    std::vector<std::pair<size_t, size_t>> r;
    for (const auto& I : b) {
        if (I.top) throw Error("oracle: Top box over a table");
        long lo = t.grid_index(I.lo), hi = t.grid_index(I.hi);
        if (lo < 0 || hi < 0) throw Error("oracle: box endpoints off the table grid");
        r.push_back({size_t(lo), size_t(hi)});
    }
    return r;
}

template <class Fn>
void for_each_index(const std::vector<std::pair<size_t, size_t>>& r, Fn fn)
{
    std::vector<size_t> idx;
    for (auto [lo, hi] : r) idx.push_back(lo);
    while (true) {
        fn(idx);
        size_t a = r.size();
        while (a > 0) {
            --a;
            if (idx[a] < r[a].second) {
                ++idx[a];
                break;
            }
            idx[a] = r[a].first;
            if (a == 0) return;
        }
        if (r.empty()) return;
    }
}

} // namespace

std::string OracleReport::text() const
{
    if (ok()) return "PASS n=" + std::to_string(checked);
    return "FAIL " + first_failure + " (" + std::to_string(failures) + " of " + std::to_string(checked) + ")";
}

Interval direct_image(const Table& t, const Box& b)
{
    Fp lo = Fp::pos_inf(), hi = Fp::neg_inf();
    bool any = false;
    for_each_index(index_box(t, b), [&](const std::vector<size_t>& idx) {
        Fp v = t.values[t.flat(idx)];
        if (v.is_nan()) throw Error("direct_image: NaN in the image");
        if (!any || v < lo) lo = v;
        if (!any || v > hi) hi = v;
        any = true;
    });
    return Interval(lo, hi);
}

std::vector<Box> enumerate_boxes(const Format& f, Fp lo, Fp hi, size_t d)
{
    std::vector<Fp> g = enumerate(f, lo, hi);
    std::vector<Interval> line;
    for (size_t i = 0; i < g.size(); ++i)
        for (size_t j = i; j < g.size(); ++j) line.push_back(Interval(g[i], g[j]));
    std::vector<Box> out{Box{}};
    for (size_t a = 0; a < d; ++a) {
        std::vector<Box> next;
        for (const Box& b : out)
            for (const Interval& I : line) {
                Box c = b;
                c.push_back(I);
                next.push_back(std::move(c));
            }
        out.swap(next);
    }
    return out;
}

std::vector<Box> sample_boxes(const Format& f, Fp lo, Fp hi, size_t d, size_t count, uint64_t seed)
{
    std::vector<Fp> g = enumerate(f, lo, hi);
    std::vector<Box> out{Box(d, Interval(lo, hi))};
    for (size_t mask = 0; mask < (size_t(1) << d); ++mask) {
        Box b;
        for (size_t a = 0; a < d; ++a) b.push_back(Interval::point(mask >> a & 1 ? hi : lo));
        out.push_back(b);
    }
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<size_t> pick(0, g.size() - 1);
    for (size_t k = 0; k < count; ++k) {
        Box b;
        for (size_t a = 0; a < d; ++a) {
            size_t i = pick(rng), j = pick(rng);
            if (i > j) std::swap(i, j);
            b.push_back(Interval(g[i], g[j]));
        }
        out.push_back(b);
    }
    return out;
}

std::vector<Fp> naive_eval(const Network& n, const std::vector<Fp>& x)
{
    if (x.size() != n.in_dim()) throw Error("naive_eval: input dimension mismatch");
    const Format& f = n.fmt();
    std::vector<Fp> v = x;
    for (size_t li = 0; li < n.layers.size(); ++li) {
        const Layer& l = n.layers[li];
        std::vector<Fp> out;
        for (const Row& r : l.rows) {
            // every column in order; a missing column has weight 0, and
            // 0 (*) x = 0 for finite x, which leaves the running sum unchanged
            Fp acc = Fp::zero();
            size_t t = 0;
            for (size_t j = 0; j < l.in_dim; ++j) {
                Fp w = Fp::zero();
                if (t < r.terms.size() && r.terms[t].first == j) w = r.terms[t++].second;
                else if (v[j].is_finite()) continue;
                acc = add(f, acc, mul(f, w, v[j]));
            }
            out.push_back(add(f, acc, r.bias));
        }
        if (li + 1 < n.layers.size() || n.no_last_affine)
            for (Fp& y : out) y = n.activation()(y);
        v = out;
    }
    return v;
}

OracleReport check_iua(const Network& n, const Table& t, const std::vector<Box>& boxes)
{
    return run_checks(boxes.size(), [&](size_t i) -> std::string {
        Interval want = direct_image(t, boxes[i]);
        Interval got = n.eval_interval(boxes[i]).at(0);
        if (got == want) return "";
        return "box=" + box_text(t.fmt, boxes[i]) + " expected=" + to_string(t.fmt, want) + " got=" + to_string(t.fmt, got);
    });
}

OracleReport check_pointwise(const Network& n, const Table& t)
{
    return run_checks(t.points(), [&](size_t k) -> std::string {
        std::vector<Fp> x = t.point(k);
        Fp got = naive_eval(n, x).at(0);
        if (got == t.values[k]) return "";
        return "box=" + vec_text(t.fmt, x) + " expected=" + encode(t.fmt, t.values[k]) + " got=" + vec_text(t.fmt, {got});
    });
}

OracleReport check_soundness(const Network& n, const std::vector<Box>& boxes)
{
    const Format& f = n.fmt();
    return run_checks(boxes.size(), [&](size_t i) -> std::string {
        const Box& b = boxes[i];
        Box got = n.eval_interval(b);
        std::vector<std::pair<size_t, size_t>> r;
        std::vector<std::vector<Fp>> axes;
        for (const auto& I : b) {
            if (I.top) throw Error("check_soundness: Top input boxes are not enumerable");
            axes.push_back(enumerate(f, I.lo, I.hi));
            r.push_back({0, axes.back().size() - 1});
        }
        std::string why;
        for_each_index(r, [&](const std::vector<size_t>& idx) {
            if (!why.empty()) return;
            std::vector<Fp> x;
            for (size_t a = 0; a < idx.size(); ++a) x.push_back(axes[a][idx[a]]);
            std::vector<Fp> y = naive_eval(n, x);
            for (size_t o = 0; o < y.size(); ++o) {
                const Interval& I = got[o];
                bool in = I.top || (!y[o].is_nan() && I.lo <= y[o] && y[o] <= I.hi);
                if (!in) {
                    why = "box=" + box_text(f, b) + " expected=" + vec_text(f, y) + " at " + vec_text(f, x) + " got=" + box_text(f, got);
                    return;
                }
            }
        });
        return why;
    });
}

OracleReport check_program(const Program& p, const Table& t, const std::vector<Box>& boxes)
{
    return run_checks(boxes.size(), [&](size_t i) -> std::string {
        Interval want = direct_image(t, boxes[i]);
        Interval got = run_program_interval(p, boxes[i]).at(0);
        if (got == want) return "";
        return "box=" + box_text(t.fmt, boxes[i]) + " expected=" + to_string(t.fmt, want) + " got=" + to_string(t.fmt, got);
    });
}

OracleReport check_program_pointwise(const Program& p, const Table& t)
{
    return run_checks(t.points(), [&](size_t k) -> std::string {
        std::vector<Fp> x = t.point(k);
        Fp got = run_program(p, x).at(0);
        if (got == t.values[k]) return "";
        return "box=" + vec_text(t.fmt, x) + " expected=" + encode(t.fmt, t.values[k]) + " got=" + vec_text(t.fmt, {got});
    });
}

Network random_network(const Format& f, const std::string& activation, size_t in_dim, size_t depth, size_t width, uint64_t seed)
{
    if (depth == 0) throw Error("random_network: depth must be positive");
    std::mt19937_64 rng(seed);
    std::vector<Fp> pool = enumerate(f, from_int(f, -2), from_int(f, 2));
    std::uniform_int_distribution<size_t> pick(0, pool.size() - 1);
    std::uniform_int_distribution<size_t> wide(1, std::max<size_t>(1, width));
    Network n(f, activation, in_dim);
    size_t d = in_dim;
    for (size_t l = 0; l < depth; ++l) {
        size_t rows = l + 1 == depth ? 1 : wide(rng);
        std::vector<std::vector<Fp>> W(rows, std::vector<Fp>(d));
        std::vector<Fp> b(rows);
        for (size_t i = 0; i < rows; ++i) {
            for (Fp& w : W[i]) w = pick(rng) % 4 == 0 ? Fp::zero() : pool[pick(rng)];
            b[i] = pool[pick(rng)];
        }
        n.layers.push_back(Network::dense_layer(W, b));
        d = rows;
    }
    n.validate();
    return n;
}

} // namespace fpiua

#include "fpiua/table.hpp"

#include <algorithm>
#include <random>

namespace fpiua {

Table::Table(const Format& f, size_t d, Fp l, Fp h) : fmt(f), dim(d), lo(l), hi(h)
{
    if (d == 0) throw Error("table: dimension must be positive");
    if (!l.is_finite() || !h.is_finite() || h < l) throw Error("table: bad domain");
    grid = enumerate(f, l, h);
    size_t n = 1;
    for (size_t i = 0; i < d; ++i) {
        if (n > (size_t(1) << 40) / grid.size()) throw Error("table: grid too large");
        n *= grid.size();
    }
    values.assign(n, Fp::zero());
}

long Table::grid_index(Fp x) const
{
    if (x.is_nan() || x < lo || x > hi) return -1;
    return long(x.c - lo.c); // codes are consecutive
}

size_t Table::flat(const std::vector<size_t>& idx) const
{
    size_t k = 0;
    for (size_t i = 0; i < dim; ++i) k = k * grid.size() + idx[i];
    return k;
}

std::vector<size_t> Table::unflat(size_t k) const
{
    std::vector<size_t> idx(dim);
    for (size_t i = dim; i-- > 0;) {
        idx[i] = k % grid.size();
        k /= grid.size();
    }
    return idx;
}

std::vector<Fp> Table::point(size_t k) const
{
    std::vector<Fp> x;
    for (size_t i : unflat(k)) x.push_back(grid[i]);
    return x;
}

Fp Table::at(const std::vector<Fp>& x) const
{
    if (x.size() != dim) throw Error("table: dimension mismatch");
    std::vector<size_t> idx;
    for (Fp v : x) {
        long g = grid_index(v);
        if (g < 0) throw Error("table: point outside the grid");
        idx.push_back(size_t(g));
    }
    return values[flat(idx)];
}

Table Table::from_function(const Format& f, size_t d, Fp lo, Fp hi, const std::function<Fp(const std::vector<Fp>&)>& fn)
{
    Table t(f, d, lo, hi);
    for (size_t k = 0; k < t.points(); ++k) {
        Fp y = fn(t.point(k));
        if (y.is_nan()) throw Error("table: target value is NaN");
        t.values[k] = y;
    }
    return t;
}

namespace {

Fp random_value(const Format& f, std::mt19937_64& rng)
{
    int64_t m = f.max_ord();
    std::uniform_int_distribution<int64_t> d(-m - 1, m + 1);
    int64_t c = d(rng);
    if (c == m + 1) return Fp::pos_inf();
    if (c == -m - 1) return Fp::neg_inf();
    return Fp(c);
}

} // namespace

Table random_table(const Format& f, size_t d, Fp lo, Fp hi, uint64_t seed)
{
    std::mt19937_64 rng(seed);
    Table t(f, d, lo, hi);
    for (auto& v : t.values) v = random_value(f, rng);
    return t;
}

Table random_blocky_table(const Format& f, size_t d, Fp lo, Fp hi, size_t pieces, uint64_t seed)
{
    std::mt19937_64 rng(seed);
    Table t(f, d, lo, hi);
    size_t g = t.grid.size();
    pieces = std::max<size_t>(1, std::min(pieces, g));
    // cut positions shared by all axes would make cells square; draw per axis
    std::vector<std::vector<size_t>> piece_of(d, std::vector<size_t>(g));
    for (size_t a = 0; a < d; ++a) {
        std::vector<size_t> pos(g - 1);
        for (size_t i = 0; i < pos.size(); ++i) pos[i] = i + 1;
        std::shuffle(pos.begin(), pos.end(), rng);
        std::vector<size_t> cuts(pos.begin(), pos.begin() + (pieces - 1));
        std::sort(cuts.begin(), cuts.end());
        size_t p = 0;
        for (size_t i = 0; i < g; ++i) {
            while (p < cuts.size() && cuts[p] <= i) ++p;
            piece_of[a][i] = p;
        }
    }
    size_t cells = 1;
    for (size_t a = 0; a < d; ++a) cells *= pieces;
    std::vector<Fp> cell_value(cells);
    for (auto& v : cell_value) v = random_value(f, rng);
    for (size_t k = 0; k < t.points(); ++k) {
        auto idx = t.unflat(k);
        size_t c = 0;
        for (size_t a = 0; a < d; ++a) c = c * pieces + piece_of[a][idx[a]];
        t.values[k] = cell_value[c];
    }
    return t;
}

std::vector<Fp> Classifier::eval(const std::vector<Fp>& x) const
{
    std::vector<Fp> y;
    for (const auto& s : scores) y.push_back(s.at(x));
    return y;
}

} // namespace fpiua

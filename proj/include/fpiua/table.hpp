#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "fpiua/interval.hpp"

namespace fpiua {

// A total function on the grid ([lo,hi]_F)^dim, stored in row-major order
// with the last coordinate varying fastest.
struct Table {
    Format fmt;
    size_t dim = 1;
    Fp lo, hi;
    std::vector<Fp> grid;   // enumerate(lo, hi)
    std::vector<Fp> values; // grid.size()^dim entries, never NaN

    Table() = default;
    Table(const Format& f, size_t d, Fp lo, Fp hi);

    size_t points() const { return values.size(); }
    // grid index of a float, or -1 when off grid
    long grid_index(Fp x) const;
    size_t flat(const std::vector<size_t>& idx) const;
    std::vector<size_t> unflat(size_t k) const;
    std::vector<Fp> point(size_t k) const;
    Fp at(const std::vector<Fp>& x) const;

    static Table from_function(const Format& f, size_t d, Fp lo, Fp hi, const std::function<Fp(const std::vector<Fp>&)>& fn);
};

// Values drawn from the finite floats plus the two infinities.
Table random_table(const Format& f, size_t d, Fp lo, Fp hi, uint64_t seed);
// Piecewise constant: each axis is cut into `pieces` random runs, every cell
// gets a random value.
Table random_blocky_table(const Format& f, size_t d, Fp lo, Fp hi, size_t pieces, uint64_t seed);

// A table classifier f: grid -> F^n with robustness parameters (delta, anchors).
// scores[i] is the i-th output coordinate; all share one grid.
struct Classifier {
    std::vector<Table> scores;
    Fp delta;
    std::vector<std::vector<Fp>> anchors;

    const Format& fmt() const { return scores.at(0).fmt; }
    size_t dim() const { return scores.at(0).dim; }
    size_t n_classes() const { return scores.size(); }
    std::vector<Fp> eval(const std::vector<Fp>& x) const;
};

} // namespace fpiua

#pragma once

#include <string>
#include <vector>

#include "fpiua/network.hpp"
#include "fpiua/program.hpp"
#include "fpiua/table.hpp"

namespace fpiua {

// Brute-force ground truth. Only the float core is shared with the code under
// test: images are enumerated and networks are evaluated by a plain column fold.

struct OracleReport {
    size_t checked = 0;
    size_t failures = 0;
    std::string first_failure; // "box=... expected=... got=..." of the lowest failing index

    bool ok() const { return failures == 0; }
    // "PASS n=..." or "FAIL box=... expected=... got=..."
    std::string text() const;
};

// <min, max> of the table over the grid points of b; b must lie on the grid
Interval direct_image(const Table& t, const Box& b);

// every box with grid endpoints in [lo,hi]^d, lexicographic order
std::vector<Box> enumerate_boxes(const Format& f, Fp lo, Fp hi, size_t d);
// the full box, the 2^d corner points, then `count` seeded random boxes
std::vector<Box> sample_boxes(const Format& f, Fp lo, Fp hi, size_t d, size_t count, uint64_t seed);

// concrete semantics by folding every column left to right (zeros included)
std::vector<Fp> naive_eval(const Network& n, const std::vector<Fp>& x);

OracleReport check_iua(const Network& n, const Table& t, const std::vector<Box>& boxes);
OracleReport check_pointwise(const Network& n, const Table& t);
// n(gamma(B)) inside gamma(n#(B)); boxes are enumerated point by point
OracleReport check_soundness(const Network& n, const std::vector<Box>& boxes);
OracleReport check_program(const Program& p, const Table& t, const std::vector<Box>& boxes);
OracleReport check_program_pointwise(const Program& p, const Table& t);

// dense random network with weights and biases drawn from the finite floats in [-2, 2]
Network random_network(const Format& f, const std::string& activation, size_t in_dim, size_t depth, size_t width, uint64_t seed);

} // namespace fpiua

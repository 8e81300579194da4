#pragma once

#include <vector>

#include "fpiua/kit.hpp"
#include "fpiua/table.hpp"

namespace fpiua {

// closed grid box: per coordinate [lo, hi]
using GridBox = std::vector<std::pair<Fp, Fp>>;

// K * iota_B, depth L_phi + (L_psi - 1) * (levels + 1), no last affine layer
Network build_box_indicator(const SeparabilityKit& kit, const GridBox& box);
// K * iota_S for S a set of grid points in [a,b]^d (given as a membership table over the grid)
Network build_set_indicator(const SeparabilityKit& kit, size_t dim, const std::vector<bool>& member);
// exact interval approximation of the table; throws on a failed self-check
Network synthesize_iua(const SeparabilityKit& kit, const Table& target);

// inclusion-maximal boxes inside S, in grid-index coordinates (lo, hi per axis)
std::vector<std::vector<std::pair<size_t, size_t>>> maximal_boxes(size_t grid, size_t dim, const std::vector<bool>& member);

// weight w with t = w (*) K: t (+) eta >= eta+ and n copies of t then (+) eta stays finite
Fp set_weight(const SeparabilityKit& kit, size_t n);
// shortest chain of terms w (*) K carrying `from` to `to` exactly by left-to-right (+)
std::vector<Fp> level_chain(const Format& f, Fp K, Fp from, Fp to);

// reference semantics of the three indicator shapes
Interval indicator_box(Fp K, const Box& x, const GridBox& box);

} // namespace fpiua

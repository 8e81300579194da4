#pragma once

#include "fpiua/kit.hpp"
#include "fpiua/program.hpp"
#include "fpiua/table.hpp"

namespace fpiua {

// f0(x) = sigma(2^-1 (*) sigma(x (+) omega)) as two steps
std::vector<Step> f0_steps(const Format& f);
// e_max - e_min + max(m1, m2) + 1
size_t g0_iterations(const Format& f);
// g0: f0 iterated g0_iterations times, then two collapsing steps
std::vector<Step> g0_steps(const Format& f);
// iota_{>z} for the identity activation; negate reads -x instead of x
std::vector<Step> identity_iota_above(const Format& f, Fp z, bool negate = false);

// Separability kit for sigma = identity over all finite floats, K = 1, eta = 1.
std::shared_ptr<SeparabilityKit> identity_kit(const Format& f);

// Straight-line program equal to the table on every input vector and
// interval-simulating it on every box over F^n.
Program synthesize_program(const Table& target, size_t max_dim = 2);

} // namespace fpiua

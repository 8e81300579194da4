#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "fpiua/interval.hpp"

namespace fpiua {

// m in [1,2): parallel * m = 1 with parallel in (1/2,1], dagger * m = 1 - 2^(-M-1)
// exactly with dagger in [1/2,1)
struct InverseResult {
    std::optional<Fp> parallel;
    std::optional<Fp> dagger;
};
InverseResult find_inverse(const Format& f, Fp m);

// gamma with 2^(ez-1) < gamma (*) K <= 5/4 2^ez; K may be negative, gamma takes its sign
Fp endbit_control(const Format& f, Fp K, int e_zeta);
bool endbit_holds(const Format& f, Fp K, int e_zeta, Fp gamma);
// the K magnitudes the lemma covers, [(1+2^(-M+1)) 2^(-M-2), 1+2^-2-2^-M]
bool endbit_k_valid(const Format& f, Fp K);

// (y1 (*) x) (+) (y2 (*) x) = eta for subnormal-range eta and normal |x| < 3/2
std::pair<Fp, Fp> subnorm_inverse(const Format& f, Fp eta, Fp x);

// x (+) (a1 (*) K) (+) ... (+) (an (*) K)
Fp telescoping_chain(const Format& f, Fp x, const std::vector<Fp>& alphas, Fp K);
Interval telescoping_chain(const Format& f, const Interval& x, const std::vector<Fp>& alphas, Fp K);

// w with w (*) x = c +- 2^(-M+e_c)
Fp onebit_weight(const Format& f, Fp x, Fp c);

// alpha_1..3 with x (+) sum = 0 for tiny x and y (+) sum = y + a, a = +-2^(-M+e_y)
std::array<Fp, 3> residue_deltas(const Format& f, Fp y, bool up);

// e_theta = max(emin-M, -e0+emin-M+1)
int determine_theta(const Format& f, int e0);

// alpha, beta so that c copies of alpha (*) K summed left to right, then (+) beta,
// stay <= eta for c < n and reach >= eta+ at c = n
struct FanIn {
    Fp alpha, beta, term;
};
std::optional<FanIn> fanin_gadget(const Format& f, Fp K, Fp eta, size_t n);
Fp fanin_value(const Format& f, const FanIn& g, size_t count);

struct SweepResult {
    size_t checked = 0;
    size_t failures = 0;
    std::string first_failure;
    bool ok() const { return checked > 0 && failures == 0; }
};

SweepResult sweep_inverse(const Format& f);
SweepResult sweep_endbit(const Format& f);
// per-step x_i drawn at random from the lemma's open interval, plus the last step to +inf
SweepResult sweep_approx_sum(const Format& f, size_t trials, uint64_t seed);
// every admissible x_i at every step, checked one step at a time
SweepResult sweep_approx_sum_steps(const Format& f);
SweepResult sweep_special_case(const Format& f);
SweepResult sweep_distribution_law(const Format& f, size_t triples, uint64_t seed);

} // namespace fpiua

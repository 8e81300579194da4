#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>

#include "fpiua/builder.hpp"
#include "fpiua/condition.hpp"

namespace fpiua {

struct MuZ {
    Fp w, b;
    bool case_a = true; // increasing: <lo,z> lands at or below eta
};

// The indicator builders of a separable activation over [a,b]:
//   phi_le(z) ~ K * [x <= z], phi_ge(z) ~ K * [x >= z]  (first step reads raw x)
//   psi ~ K * [x > eta]                                  (first step reads sigma(x))
// Every phi chain has the same length, so L_phi is uniform.
struct SeparabilityKit {
    Format fmt;
    ActPtr act;
    Fp K, eta, eta_plus;
    Fp a, b;
    std::optional<Witness> witness;

    std::vector<Step> psi;
    std::function<std::vector<Step>(Fp)> phi_le, phi_ge;
    size_t phi_len = 0; // steps per phi chain

    size_t L_phi() const { return phi_len + 1; }
    size_t L_psi() const { return psi.size() + 2; }

    // standalone networks, mostly for checks
    Network psi_network() const;
    Network phi_le_network(Fp z) const;
    Network phi_ge_network(Fp z) const;
};

// the separate pieces of the contraction construction
struct ContractionParts {
    std::vector<Step> mu; // repeated contraction step
    Step tau_12;          // eta -> c1, eta+ -> c2
    Step tau_21;          // eta -> c2, eta+ -> c1
    int e_theta = 0;
};

ContractionParts build_contraction(const Activation& act, const Witness& w);
MuZ build_mu_z(const Activation& act, const Witness& w, Fp z, Fp a, Fp b);

// Networks for the individual lemma checks
Network mu_network(const Activation& act, const ContractionParts& p);
Network tau_network(const Activation& act, const Step& tau);
Network mu_z_network(const Activation& act, const MuZ& m);

// kit over [a,b]; throws when a postcondition check fails
std::shared_ptr<SeparabilityKit> make_kit(ActPtr act, const Witness& w, Fp a, Fp b);
std::shared_ptr<SeparabilityKit> make_kit(const Format& f, const std::string& activation);

// (K iota_{> eta})# of an interval, the reference semantics for psi
Interval indicator_above(const SeparabilityKit& kit, const Interval& x);
// (K iota_S)# for S = [lo, hi] on a line: <K,K> inside, <0,0> disjoint, hull otherwise
Interval indicator_range(Fp K, const Interval& x, Fp lo, Fp hi);

} // namespace fpiua

#pragma once

#include <optional>
#include <string>

#include "fpiua/activation.hpp"

namespace fpiua {

struct Witness {
    Fp c1, c2, K;
    Fp eta, eta_plus;
    mpq_class lambda; // smallest slope bound that works for this eta
    bool increasing = true; // sigma(eta) < sigma(eta+)
    // relaxed-condition byproducts
    int e_eta = 0;   // expo(eta)
    int e_sigma = 0; // max(expo sigma(eta), expo sigma(eta+))
    int e0 = 0;      // 2^e0 <= |sigma(eta+) - sigma(eta)| < 2^(e0+1)
    int e_theta = 0;
    int e_zeta = 0;
};

struct ConditionReport {
    bool ok = false;
    std::string failed; // "C1", "C2", "C3" or empty
    std::string reason;
    std::optional<Witness> witness;
};

// Exhaustive search for a strict-condition witness over the finite floats.
ConditionReport check_condition(const Activation& act);
// Re-verify every field of a witness against the strict predicates.
bool verify_witness(const Activation& act, const Witness& w, std::string* why = nullptr);
// The relaxed predicates, checked for the same witness.
bool verify_relaxed(const Activation& act, const Witness& w, std::string* why = nullptr);

// Magnitude window for sigma(c2): [eps/2 + 2 eps^2, 5/4 - 2 eps]
std::pair<mpq_class, mpq_class> k_range(const Format& f);
// Slope cap of the real-valued sufficient condition: 2^(emax-9)/5
mpq_class lambda_cap(const Format& f);

std::string decimal(const mpq_class& q, int max_digits = 40);
std::string sci(const mpq_class& q, int sig = 3);

std::string witness_text(const Format& f, const Witness& w);
std::string condition_table_report(const Format& f);

} // namespace fpiua

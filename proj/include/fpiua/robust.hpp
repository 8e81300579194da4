#pragma once

#include <string>
#include <vector>

#include "fpiua/kit.hpp"
#include "fpiua/table.hpp"

namespace fpiua {

// argmax with the lowest index winning ties (0-based); throws on NaN
size_t classify(const std::vector<Fp>& y);

// grid box of the points within l-inf distance delta of x0, clamped to [lo,hi]
Box neighborhood(const Format& f, const std::vector<Fp>& x0, Fp delta, Fp lo, Fp hi);

struct AnchorVerdict {
    std::vector<Fp> anchor;
    Box box;
    Box output; // empty for the table check
    bool robust = false;
};

struct RobustReport {
    std::vector<AnchorVerdict> anchors;
    bool robust = true;
    std::string text(const Format& f) const;
};

// every grid point of each neighbourhood gets the anchor's class
RobustReport check_robust(const Classifier& c);
bool is_robust(const Classifier& c);
// one interval evaluation per anchor; every vector in the output box must get one class
RobustReport check_provably_robust(const Network& n, Fp delta, const std::vector<std::vector<Fp>>& anchors, Fp lo, Fp hi);
bool is_provably_robust(const Network& n, Fp delta, const std::vector<std::vector<Fp>>& anchors, Fp lo, Fp hi);
// the classes some vector of the box is assigned to
std::vector<size_t> reachable_classes(const Box& out);

// Network predicting like c and delta-provably robust on its anchors: one
// one-hot indicator network per class, stacked side by side.
Network synthesize_robust(const Classifier& c, const SeparabilityKit& kit);
// outputs of all parts in order; equal depths and input dimensions required
Network stack_networks(const std::vector<Network>& parts);

} // namespace fpiua

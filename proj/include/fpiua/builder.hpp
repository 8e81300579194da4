#pragma once

#include <map>
#include <vector>

#include "fpiua/network.hpp"

namespace fpiua {

// One affine neuron reading a single previous value s:
//   w (*) sigma(s) (+) alpha_1 (*) sigma(z_1) (+) ... (+) b
// (the first step of a chain reading raw inputs has no sigma and no constants).
struct Step {
    Fp w;
    std::vector<std::pair<Fp, Fp>> consts; // (z, alpha)
    Fp b;
};

Fp apply_step(const Arith& a, const Activation& act, const Step& s, Fp x, bool raw = false);
Interval apply_step(const Arith& a, const Activation& act, const Step& s, const Interval& x, bool raw = false);

// Assembles a network layer by layer. Layer 0 holds the raw inputs; a row at
// layer k >= 2 reads sigma of rows at layer k-1, a row at layer 1 reads the
// inputs directly. Constant neurons sigma(z) are rows with bias z and no terms,
// shared per (layer, z-list) and placed after the ordinary rows of their layer,
// so every row lists its columns in increasing order.
class NetBuilder {
public:
    struct H {
        uint32_t layer = 0;
        uint32_t idx = 0;
    };

    NetBuilder(const Format& f, const std::string& activation, size_t in_dim);

    H input(size_t i) const;
    // terms must reference rows of layer-1 in increasing order
    H add_row(uint32_t layer, const std::vector<std::pair<H, Fp>>& terms, const std::vector<std::pair<Fp, Fp>>& consts,
              Fp bias);
    H add_step(H in, const Step& s) { return add_row(in.layer + 1, {{in, s.w}}, s.consts, s.b); }
    H chain(H in, const std::vector<Step>& steps);
    size_t layers() const { return rows_.size() - 1; }
    size_t row_count(uint32_t layer) const { return rows_.at(layer).size(); }
    const Format& fmt() const { return fmt_; }

    // outputs must be every ordinary row of the last layer, in order
    Network finalize(const std::vector<H>& outputs, bool no_last_affine, bool no_first_affine = false);

private:
    struct PRow {
        std::vector<std::pair<uint32_t, Fp>> terms;
        int group = -1;
        std::vector<Fp> alphas;
        Fp bias;
    };
    Format fmt_;
    std::string act_;
    size_t in_dim_;
    std::vector<std::vector<PRow>> rows_; // rows_[0] unused (inputs)
    std::vector<std::map<std::vector<int64_t>, int>> group_ids_;
    std::vector<std::vector<std::vector<Fp>>> groups_; // per layer, z-lists
};

} // namespace fpiua

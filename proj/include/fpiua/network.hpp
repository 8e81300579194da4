#pragma once

#include <string>
#include <vector>

#include "fpiua/activation.hpp"

namespace fpiua {

// One affine output coordinate. Terms are (column, weight) with strictly
// increasing columns; every other column carries weight 0.
struct Row {
    std::vector<std::pair<uint32_t, Fp>> terms;
    Fp bias;
};

struct Layer {
    size_t in_dim = 0;
    std::vector<Row> rows;
};

// aff_L o sigma o aff_{L-1} o ... o sigma o aff_1, with sums taken over columns
// in increasing order. With no_last_affine the network ends in sigma and the
// final identity layer is implicit, so depth() counts it but layers does not.
// With no_first_affine the first stored layer is a rectangular identity
// (rows past the input dimension may carry a bias only).
class Network {
public:
    Network() = default;
    Network(const Format& f, const std::string& activation, size_t in_dim);

    const Format& fmt() const { return fmt_; }
    const std::string& activation_name() const { return act_name_; }
    const Activation& activation() const { return *act_; }
    ActPtr activation_ptr() const { return act_; }
    size_t in_dim() const { return in_dim_; }
    size_t out_dim() const;
    size_t depth() const { return layers.size() + (no_last_affine ? 1 : 0); }
    size_t neuron_count() const;
    size_t weight_count() const;

    std::vector<Layer> layers;
    bool no_first_affine = false;
    bool no_last_affine = false;

    // throws Error on shape problems, non-finite weights or inconsistent flags
    void validate() const;

    std::vector<Fp> eval(const std::vector<Fp>& x) const;
    Box eval_interval(const Box& b) const;
    // every post-affine box, before the activation is applied
    std::vector<Box> trace_interval(const Box& b) const;

    // dense W (d_out x d_in) and b
    std::vector<std::vector<Fp>> dense_weights(size_t layer) const;
    static Layer dense_layer(const std::vector<std::vector<Fp>>& W, const std::vector<Fp>& b);

private:
    Format fmt_;
    std::string act_name_;
    ActPtr act_;
    size_t in_dim_ = 0;
};

// outer o inner, merging the junction into a single affine layer
Network compose(const Network& outer, const Network& inner);

// 1/2 (relu(x+y) - relu(-x-y) - relu(x-y) - relu(y-x)), which is min(x,y) over the reals
Network relu_min_network(const Format& f);

// identity activation network with W = I, b = 0
Network identity_network(const Format& f, size_t dim, const std::string& activation = "identity");

} // namespace fpiua

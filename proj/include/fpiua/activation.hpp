#pragma once

#include <memory>
#include <string>
#include <vector>

#include "fpiua/interval.hpp"

namespace fpiua {

class RoundingUndecided : public Error {
public:
    using Error::Error;
};

// Correctly rounded activation over one format. Values are tabulated for
// formats with at most 2^17 finite floats; larger formats compute on demand.
class Activation {
public:
    static std::shared_ptr<const Activation> make(const Format& f, const std::string& name);
    static std::shared_ptr<const Activation> custom(const Format& f, const std::string& name, const FpFn& fn,
                                                    bool monotone = false);
    static const std::vector<std::string>& names();

    const std::string& name() const { return name_; }
    const Format& fmt() const { return f_; }
    bool monotone() const { return monotone_; }
    bool tabulated() const { return !table_.empty(); }

    Fp operator()(Fp x) const;
    // exact hull of the image of gamma(x); Top iff the image holds NaN
    Interval lift(const Interval& x) const;
    // min and max of sigma over the finite floats in [lo,hi]; tabulated formats only
    std::pair<Fp, Fp> range_minmax(Fp lo, Fp hi) const;

private:
    Activation(const Format& f, std::string name) : f_(f), name_(std::move(name)) {}
    void tabulate();
    Fp compute(Fp x) const;

    Format f_;
    std::string name_;
    bool monotone_ = false;
    FpFn custom_;
    std::vector<Fp> table_;             // index = code + max_ord
    std::vector<std::vector<Fp>> smin_; // sparse tables over table_
    std::vector<std::vector<Fp>> smax_;
    Fp at_neg_inf_, at_pos_inf_;
};

using ActPtr = std::shared_ptr<const Activation>;

// rnd(rho(x)) for finite x by enclosure refinement at 64/128/256 bits
Fp correctly_rounded(const Format& f, const std::string& name, Fp x);
// the real activation evaluated at a rational point to ~`prec` bits (reports only)
double real_activation(const std::string& name, double x);

} // namespace fpiua

// Acceptance run: one PASS/FAIL line per criterion. Pass a criterion number to run one.
#include <chrono>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "fpiua/completeness.hpp"
#include "fpiua/condition.hpp"
#include "fpiua/io.hpp"
#include "fpiua/lemmas.hpp"
#include "fpiua/oracle.hpp"
#include "fpiua/robust.hpp"
#include "fpiua/synth.hpp"

using namespace fpiua;

namespace {

const Format f(5, 3);
const std::vector<std::string> kActs{"relu", "identity"};

Fp num(long n, long d = 1) { return round(f, mpq_class(n, d)); }

struct Line {
    bool pass = true;
    std::ostringstream detail;
    void add(bool ok, const std::string& s)
    {
        pass = pass && ok;
        if (detail.tellp() > 0) detail << "; ";
        detail << s;
    }
};

// through the file format, as the command line does
Network reload(const Network& n) { return network_from_text(network_to_text(n)); }

Network iua(const std::string& act, const Table& t) { return reload(synthesize_iua(*make_kit(f, act), t)); }

Table target_1d(uint64_t seed) { return random_table(f, 1, num(-1), num(1), seed); }
Table target_2d(uint64_t seed) { return random_blocky_table(f, 2, num(-1), num(1), 6, seed); }

void c1(Line& l)
{
    Table t = target_1d(2024);
    auto boxes = enumerate_boxes(f, num(-1), num(1), 1);
    for (const auto& a : kActs) {
        OracleReport r = check_iua(iua(a, t), t, boxes);
        l.add(r.ok(), a + " " + r.text());
    }
}

void c2(Line& l)
{
    Table t = target_2d(2024);
    auto boxes = sample_boxes(f, num(-1), num(1), 2, 10000, 7);
    for (const auto& a : kActs) {
        OracleReport r = check_iua(iua(a, t), t, boxes);
        l.add(r.ok() && boxes[0] == Box(2, Interval(num(-1), num(1))), a + " " + r.text());
    }
}

void c3(Line& l)
{
    Table t1 = target_1d(2024), t2 = target_2d(2024);
    for (const auto& a : kActs) {
        OracleReport r1 = check_pointwise(iua(a, t1), t1);
        OracleReport r2 = check_pointwise(iua(a, t2), t2);
        l.add(r1.ok() && r2.ok(), a + " d=1 " + r1.text() + " d=2 " + r2.text());
    }
}

void c4(Line& l)
{
    // boxes anywhere in the extended floats, at most 24 floats wide per axis
    auto ext = enumerate(f, Fp::neg_inf(), Fp::pos_inf());
    size_t violations = 0, boxes = 0;
    std::string first;
    for (uint64_t s = 0; s < 100; ++s) {
        std::mt19937_64 rng(s);
        const auto& names = Activation::names();
        std::string act = names[s % names.size()];
        size_t depth = 1 + rng() % 4, width = 1 + rng() % 6, d = 1 + s % 2;
        Network n = random_network(f, act, d, depth, width, s);
        std::vector<Box> bs;
        for (int k = 0; k < 1000; ++k) {
            Box b;
            for (size_t a = 0; a < d; ++a) {
                size_t lo = rng() % ext.size(), hi = std::min(ext.size() - 1, lo + rng() % 24);
                b.push_back(Interval(ext[lo], ext[hi]));
            }
            bs.push_back(b);
        }
        OracleReport r = check_soundness(n, bs);
        boxes += r.checked;
        violations += r.failures;
        if (!r.ok() && first.empty()) first = r.first_failure;
    }
    l.add(violations == 0, "networks=100 boxes=" + std::to_string(boxes) + " violations=" + std::to_string(violations) + (first.empty() ? "" : " first " + first));
}

void c5(Line& l)
{
    Network mu = relu_min_network(f);
    Fp eps = num(1, 16), half_eps = num(1, 32), one = num(1);
    Fp at_eps = mu.eval({one, eps})[0], at_half = mu.eval({one, half_eps})[0];
    l.add(at_eps == Fp::zero(), "mu(1,eps=" + show(f, eps) + ") = " + show(f, at_eps) + " (claimed 0)");
    l.add(true, "min(1,eps) = " + show(f, eps) + ", so mu(1,eps) != min(1,eps) still holds");
    l.add(true, "mu(1,eps/2) = " + show(f, at_half) + " != " + show(f, half_eps) + " = min(1,eps/2)");
}

void c6(Line& l)
{
    for (const Format& g : {Format(5, 3), Format(5, 10)}) {
        std::string failed;
        for (const auto& name : Activation::names()) {
            auto act = Activation::make(g, name);
            ConditionReport r = check_condition(*act);
            if (!r.ok || !verify_witness(*act, *r.witness)) failed += " " + name;
        }
        l.add(failed.empty(), g.name() + (failed.empty() ? " all 9 activations" : " failed:" + failed));
    }
    std::string rep = condition_table_report(f);
    bool range = rep.find("[0.0390625, 1.125]") != std::string::npos;
    bool cap = lambda_cap(f) == mpq_class(64, 5);
    l.add(range && cap, std::string("range [0.0390625, 1.125] ") + (range ? "ok" : "missing") + ", lambda cap " + decimal(lambda_cap(f)));
}

void c7(Line& l)
{
    auto sw = [&](const std::string& name, const SweepResult& r) {
        l.add(r.ok(), name + " checked " + std::to_string(r.checked) + " failed " + std::to_string(r.failures) + (r.ok() ? "" : " " + r.first_failure));
    };
    sw("inverse", sweep_inverse(f));
    sw("endbit", sweep_endbit(f));
    sw("approx_sum", sweep_approx_sum(f, 1000, 77));
    sw("special_case", sweep_special_case(f));
    sw("distribution_law", sweep_distribution_law(f, 10000, 77));
}

void c8(Line& l)
{
    Fp big = largest(f);
    Table t = random_table(f, 1, -big, big, 2024);
    Program p = program_from_text(program_to_text(synthesize_program(t)));
    OracleReport pw = check_program_pointwise(p, t);
    OracleReport iv = check_program(p, t, enumerate_boxes(f, -big, big, 1));
    l.add(pw.ok() && pw.checked == 495, "instructions=" + std::to_string(p.code.size()) + " pointwise " + pw.text());
    l.add(iv.ok(), "intervals " + iv.text());
}

void c9(Line& l)
{
    Fp th = num(0), delta = num(1, 32), one = num(1);
    Classifier c;
    c.delta = delta;
    c.scores.push_back(Table::from_function(f, 1, num(-1), num(1), [&](const auto& x) { return x[0] < th ? one : Fp::zero(); }));
    c.scores.push_back(Table::from_function(f, 1, num(-1), num(1), [&](const auto& x) { return x[0] < th ? Fp::zero() : one; }));
    // every grid point whose neighbourhood stays on one side of the threshold
    for (Fp x : c.scores[0].grid) {
        Box b = neighborhood(f, {x}, delta, num(-1), num(1));
        if (b[0].hi < th || b[0].lo >= th) c.anchors.push_back({x});
    }
    l.add(is_robust(c), "anchors=" + std::to_string(c.anchors.size()) + " classifier robust");
    Network n = reload(synthesize_robust(c, *make_kit(f, "relu")));
    size_t same = 0, onehot = 0;
    for (const auto& a : c.anchors) same += classify(n.eval(a)) == classify(c.eval(a));
    RobustReport r = check_provably_robust(n, delta, c.anchors, num(-1), num(1));
    for (const auto& v : r.anchors) {
        bool single = v.output.size() == 2 && !v.output[0].top && !v.output[1].top && v.output[0].lo == v.output[0].hi &&
                      v.output[1].lo == v.output[1].hi;
        bool hot = single && ((v.output[0].lo == one && v.output[1].lo.is_zero()) || (v.output[1].lo == one && v.output[0].lo.is_zero()));
        onehot += hot;
    }
    l.add(same == c.anchors.size(), "same prediction " + std::to_string(same) + "/" + std::to_string(c.anchors.size()));
    l.add(r.robust, std::string("provably robust ") + (r.robust ? "true" : "false"));
    l.add(onehot == c.anchors.size(), "one-hot singleton boxes " + std::to_string(onehot) + "/" + std::to_string(c.anchors.size()));
}

void c10(Line& l)
{
    for (const auto& a : kActs)
        for (size_t d : {1, 2}) {
            std::vector<size_t> depths;
            for (uint64_t s = 1; s <= 5; ++s) depths.push_back(synthesize_iua(*make_kit(f, a), d == 1 ? target_1d(s) : target_2d(s)).depth());
            bool same = std::equal(depths.begin() + 1, depths.end(), depths.begin());
            std::string ds;
            for (size_t x : depths) ds += (ds.empty() ? "" : ",") + std::to_string(x);
            l.add(same, a + " d=" + std::to_string(d) + " depths " + ds);
        }
}

} // namespace

int main(int argc, char** argv)
{
    std::vector<void (*)(Line&)> all{c1, c2, c3, c4, c5, c6, c7, c8, c9, c10};
    std::vector<int> which;
    if (argc > 1) which.push_back(std::stoi(argv[1]));
    else
        for (int i = 1; i <= 10; ++i) which.push_back(i);
    bool ok = true;
    for (int k : which) {
        if (k < 1 || k > 10) {
            std::cerr << "no criterion " << k << "\n";
            return 2;
        }
        Line l;
        auto t0 = std::chrono::steady_clock::now();
        try {
            all[size_t(k - 1)](l);
        } catch (const std::exception& e) {
            l.add(false, std::string("error: ") + e.what());
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cout << "criterion " << k << " " << (l.pass ? "PASS" : "FAIL") << ": " << l.detail.str() << " (" << std::fixed
                  << std::setprecision(1) << secs << "s)" << std::endl;
        ok = ok && l.pass;
    }
    return ok ? 0 : 1;
}

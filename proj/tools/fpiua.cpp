// fpiua command line: format reports, activation checks, synthesis and verification.
#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <random>

#include "fpiua/completeness.hpp"
#include "fpiua/condition.hpp"
#include "fpiua/io.hpp"
#include "fpiua/oracle.hpp"
#include "fpiua/robust.hpp"
#include "fpiua/synth.hpp"

using namespace fpiua;

namespace {

struct Failed {
    int code;
};

std::shared_ptr<SeparabilityKit> kit_for(const Format& f, const std::string& activation, Fp lo, Fp hi)
{
    auto act = Activation::make(f, activation);
    ConditionReport r = check_condition(*act);
    if (!r.ok) throw Error(activation + " fails " + r.failed + ": " + r.reason);
    return make_kit(act, *r.witness, lo, hi);
}

std::vector<Fp> parse_point(const Format& f, const std::string& s)
{
    std::vector<Fp> x;
    std::stringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ',')) x.push_back(decode(f, tok));
    return x;
}

void report(const std::string& what, const OracleReport& r, bool& ok)
{
    std::cout << what << " " << r.text() << "\n";
    ok = ok && r.ok();
}

std::vector<Box> boxes_for(const Table& t, bool exhaustive, size_t samples, uint64_t seed)
{
    if (exhaustive) return enumerate_boxes(t.fmt, t.lo, t.hi, t.dim);
    return sample_boxes(t.fmt, t.lo, t.hi, t.dim, samples, seed);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Exact interval universal approximation for floating-point networks"};
    app.require_subcommand(1);

    // fmt info
    auto* fmt = app.add_subcommand("fmt", "format information");
    fmt->require_subcommand(1);
    auto* fmt_info = fmt->add_subcommand("info", "parameters and activation condition report");
    std::string format = "E5M3";
    fmt_info->add_option("--format", format, "ExMy format")->capture_default_str();

    // act check
    auto* act = app.add_subcommand("act", "activation functions");
    act->require_subcommand(1);
    auto* act_check = act->add_subcommand("check", "search for a condition witness");
    std::string activation = "relu";
    act_check->add_option("--format", format)->capture_default_str();
    act_check->add_option("--activation", activation)->capture_default_str();

    // gen
    auto* gen = app.add_subcommand("gen", "seeded inputs");
    gen->require_subcommand(1);
    auto* gen_table = gen->add_subcommand("table", "random target table");
    size_t dim = 1, pieces = 0;
    uint64_t seed = 1;
    bool full = false;
    std::string out;
    gen_table->add_option("--format", format)->capture_default_str();
    gen_table->add_option("--dim", dim)->capture_default_str();
    gen_table->add_option("--seed", seed)->capture_default_str();
    gen_table->add_option("--blocky", pieces, "piecewise constant with this many runs per axis");
    gen_table->add_flag("--full", full, "domain is every finite float instead of [-1,1]");
    gen_table->add_option("--out", out)->required();
    auto* gen_cls = gen->add_subcommand("classifier", "two-class threshold classifier on [-1,1]");
    std::string threshold = "+:-1:8", delta = "+:-5:8";
    size_t anchors = 16;
    gen_cls->add_option("--format", format)->capture_default_str();
    gen_cls->add_option("--threshold", threshold)->capture_default_str();
    gen_cls->add_option("--delta", delta)->capture_default_str();
    gen_cls->add_option("--anchors", anchors)->capture_default_str();
    gen_cls->add_option("--seed", seed)->capture_default_str();
    gen_cls->add_option("--out", out)->required();

    // synth
    auto* synth = app.add_subcommand("synth", "synthesis");
    synth->require_subcommand(1);
    std::string target, net, classifier, program;
    auto* s_iua = synth->add_subcommand("iua", "network interval-approximating a table");
    s_iua->add_option("--format", format)->capture_default_str();
    s_iua->add_option("--activation", activation)->capture_default_str();
    s_iua->add_option("--target", target)->required();
    s_iua->add_option("--out", out)->required();
    auto* s_rob = synth->add_subcommand("robust", "provably robust network for a classifier");
    s_rob->add_option("--classifier", classifier)->required();
    s_rob->add_option("--activation", activation)->capture_default_str();
    s_rob->add_option("--out", out)->required();
    auto* s_prog = synth->add_subcommand("program", "straight-line program for a table over all finite floats");
    s_prog->add_option("--format", format)->capture_default_str();
    s_prog->add_option("--target", target)->required();
    s_prog->add_option("--out", out)->required();

    // verify
    auto* verify = app.add_subcommand("verify", "oracle checks");
    verify->require_subcommand(1);
    bool exhaustive = false;
    size_t samples = 10000;
    auto* v_iua = verify->add_subcommand("iua", "interval and pointwise equality with the table");
    v_iua->add_option("--net", net)->required();
    v_iua->add_option("--target", target)->required();
    auto* v_iua_ex = v_iua->add_flag("--exhaustive", exhaustive, "every box");
    v_iua->add_option("--samples", samples)->capture_default_str()->excludes(v_iua_ex);
    v_iua->add_option("--seed", seed)->capture_default_str();
    auto* v_rob = verify->add_subcommand("robust", "predictions and certification on the anchors");
    v_rob->add_option("--net", net)->required();
    v_rob->add_option("--classifier", classifier)->required();
    auto* v_prog = verify->add_subcommand("program", "pointwise and interval simulation of the table");
    v_prog->add_option("--program", program)->required();
    v_prog->add_option("--target", target)->required();
    auto* v_prog_ex = v_prog->add_flag("--exhaustive", exhaustive, "every interval");
    v_prog->add_option("--samples", samples)->capture_default_str()->excludes(v_prog_ex);
    v_prog->add_option("--seed", seed)->capture_default_str();

    // eval
    auto* ev = app.add_subcommand("eval", "evaluate a network on a point or a box");
    std::string input, box;
    ev->add_option("--net", net)->required();
    auto* ev_in = ev->add_option("--input", input, "comma separated s:e:m values");
    ev->add_option("--box", box, "[lo,hi],...")->excludes(ev_in);

    CLI11_PARSE(app, argc, argv);

    try {
        if (fmt_info->parsed()) {
            Format f = Format::parse(format);
            std::cout << "e_min " << f.emin() << "\n"
                      << "e_max " << f.emax() << "\n"
                      << "omega " << show(f, smallest(f)) << "\n"
                      << "Omega " << show(f, largest(f)) << "\n"
                      << "eps " << decimal(mpq_class(1, mpz_class(1) << (f.M + 1))) << "\n"
                      << "finite " << 2 * f.max_ord() + 1 << "\n";
            std::cout << condition_table_report(f);
        } else if (act_check->parsed()) {
            Format f = Format::parse(format);
            auto a = Activation::make(f, activation);
            ConditionReport r = check_condition(*a);
            if (!r.ok) {
                std::cout << activation << " FAIL " << r.failed << ": " << r.reason << "\n";
                return 1;
            }
            std::cout << activation << " PASS\n" << witness_text(f, *r.witness);
        } else if (gen_table->parsed()) {
            Format f = Format::parse(format);
            Fp lo = full ? -largest(f) : from_int(f, -1), hi = full ? largest(f) : from_int(f, 1);
            Table t = pieces ? random_blocky_table(f, dim, lo, hi, pieces, seed) : random_table(f, dim, lo, hi, seed);
            write_file(out, table_to_text(t));
        } else if (gen_cls->parsed()) {
            Format f = Format::parse(format);
            Fp lo = from_int(f, -1), hi = from_int(f, 1), th = decode(f, threshold), one = from_int(f, 1);
            Classifier c;
            c.delta = decode(f, delta);
            c.scores.push_back(Table::from_function(f, 1, lo, hi, [&](const auto& x) { return x[0] < th ? one : Fp::zero(); }));
            c.scores.push_back(Table::from_function(f, 1, lo, hi, [&](const auto& x) { return x[0] < th ? Fp::zero() : one; }));
            // anchors: seeded grid points farther than delta from the threshold
            std::mt19937_64 rng(seed);
            std::vector<Fp> grid = c.scores[0].grid, ok;
            for (Fp x : grid) {
                Box nb = neighborhood(f, {x}, c.delta, lo, hi);
                if (nb[0].hi < th || nb[0].lo >= th) ok.push_back(x);
            }
            std::shuffle(ok.begin(), ok.end(), rng);
            ok.resize(std::min(ok.size(), anchors));
            std::sort(ok.begin(), ok.end());
            for (Fp x : ok) c.anchors.push_back({x});
            write_file(out, classifier_to_text(c));
        } else if (s_iua->parsed()) {
            Format f = Format::parse(format);
            Table t = table_from_text(read_file(target));
            if (!(t.fmt == f)) throw Error("target format differs from --format");
            auto kit = kit_for(f, activation, t.lo, t.hi);
            Network n = synthesize_iua(*kit, t);
            write_file(out, network_to_text(n));
            std::cout << "depth " << n.depth() << " neurons " << n.neuron_count() << " weights " << n.weight_count() << "\n";
        } else if (s_rob->parsed()) {
            Classifier c = classifier_from_text(read_file(classifier));
            const Table& t = c.scores.at(0);
            auto kit = kit_for(c.fmt(), activation, t.lo, t.hi);
            Network n = synthesize_robust(c, *kit);
            write_file(out, network_to_text(n));
            std::cout << "depth " << n.depth() << " neurons " << n.neuron_count() << "\n";
        } else if (s_prog->parsed()) {
            Format f = Format::parse(format);
            Table t = table_from_text(read_file(target));
            if (!(t.fmt == f)) throw Error("target format differs from --format");
            Program p = synthesize_program(t);
            write_file(out, program_to_text(p));
            std::cout << "instructions " << p.code.size() << "\n";
        } else if (v_iua->parsed()) {
            Network n = network_from_text(read_file(net));
            Table t = table_from_text(read_file(target));
            bool ok = true;
            report("pointwise", check_pointwise(n, t), ok);
            report("interval", check_iua(n, t, boxes_for(t, exhaustive, samples, seed)), ok);
            if (!ok) return 1;
        } else if (v_rob->parsed()) {
            Network n = network_from_text(read_file(net));
            Classifier c = classifier_from_text(read_file(classifier));
            const Table& t = c.scores.at(0);
            bool same = true;
            for (const auto& a : c.anchors) same = same && classify(n.eval(a)) == classify(c.eval(a));
            std::cout << "predictions " << (same ? "PASS" : "FAIL") << " anchors=" << c.anchors.size() << "\n";
            RobustReport r = check_provably_robust(n, c.delta, c.anchors, t.lo, t.hi);
            std::cout << r.text(c.fmt());
            if (!same || !r.robust) return 1;
        } else if (v_prog->parsed()) {
            Program p = program_from_text(read_file(program));
            Table t = table_from_text(read_file(target));
            bool ok = true;
            report("pointwise", check_program_pointwise(p, t), ok);
            report("interval", check_program(p, t, boxes_for(t, exhaustive, samples, seed)), ok);
            if (!ok) return 1;
        } else if (ev->parsed()) {
            Network n = network_from_text(read_file(net));
            const Format& f = n.fmt();
            if (!box.empty()) {
                Box y = n.eval_interval(parse_box(f, box));
                for (size_t i = 0; i < y.size(); ++i) std::cout << (i ? "," : "") << to_string(f, y[i]);
            } else {
                std::vector<Fp> y = n.eval(parse_point(f, input));
                for (size_t i = 0; i < y.size(); ++i) std::cout << (i ? "," : "") << encode(f, y[i]);
            }
            std::cout << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

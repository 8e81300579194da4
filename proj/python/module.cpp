#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fpiua/completeness.hpp"
#include "fpiua/condition.hpp"
#include "fpiua/io.hpp"
#include "fpiua/kit.hpp"
#include "fpiua/oracle.hpp"
#include "fpiua/program.hpp"
#include "fpiua/robust.hpp"
#include "fpiua/synth.hpp"

namespace py = pybind11;
using namespace fpiua;

namespace {

// Python sees floats as their "s:e:m" codes or as Python numbers.
Fp to_fp(const Format& f, const py::handle& h)
{
    if (py::isinstance<py::str>(h)) return decode(f, h.cast<std::string>());
    if (py::isinstance<py::int_>(h)) return round(f, mpq_class(h.cast<long>()));
    double d = h.cast<double>();
    if (std::isnan(d)) return Fp::nan();
    if (std::isinf(d)) return d > 0 ? Fp::pos_inf() : Fp::neg_inf();
    return round(f, mpq_class(d));
}

std::vector<Fp> to_point(const Format& f, const py::sequence& xs)
{
    std::vector<Fp> r;
    for (auto h : xs) r.push_back(to_fp(f, h));
    return r;
}

Box to_box(const Format& f, const py::sequence& xs)
{
    Box b;
    for (auto h : xs) {
        auto p = h.cast<py::sequence>();
        if (p.size() != 2) throw Error("box coordinates are (lo, hi) pairs");
        b.emplace_back(to_fp(f, p[0]), to_fp(f, p[1]));
    }
    return b;
}

std::vector<std::string> codes(const Format& f, const std::vector<Fp>& xs)
{
    std::vector<std::string> r;
    for (Fp x : xs) r.push_back(encode(f, x));
    return r;
}

// None for Top, else (lo, hi) codes
py::list box_out(const Format& f, const Box& b)
{
    py::list r;
    for (const auto& I : b) {
        if (I.top) r.append(py::none());
        else r.append(py::make_tuple(encode(f, I.lo), encode(f, I.hi)));
    }
    return r;
}

std::vector<Box> boxes_for(const Table& t, size_t samples, uint64_t seed)
{
    if (samples == 0) return enumerate_boxes(t.fmt, t.lo, t.hi, t.dim);
    return sample_boxes(t.fmt, t.lo, t.hi, t.dim, samples, seed);
}

std::shared_ptr<SeparabilityKit> kit_for(const Format& f, const std::string& activation, Fp lo, Fp hi)
{
    auto act = Activation::make(f, activation);
    ConditionReport r = check_condition(*act);
    if (!r.ok) throw Error(activation + " fails " + r.failed + ": " + r.reason);
    return make_kit(act, *r.witness, lo, hi);
}

py::dict report_dict(const OracleReport& r)
{
    py::dict d;
    d["ok"] = r.ok();
    d["checked"] = r.checked;
    d["failures"] = r.failures;
    d["first_failure"] = r.first_failure;
    d["text"] = r.text();
    return d;
}

} // namespace

PYBIND11_MODULE(_fpiua, m)
{
    m.doc() = "interval universal approximation over floating-point formats";

    py::register_exception<Error>(m, "FpiuaError", PyExc_ValueError);

    py::class_<Format>(m, "Format")
        .def(py::init([](int e, int mm) { return Format(e, mm); }), py::arg("E"), py::arg("M"))
        .def_static("parse", &Format::parse)
        .def_readonly("E", &Format::E)
        .def_readonly("M", &Format::M)
        .def_readonly("strict", &Format::strict)
        .def_property_readonly("name", &Format::name)
        .def_property_readonly("emin", &Format::emin)
        .def_property_readonly("emax", &Format::emax)
        .def_property_readonly("finite_count", &Format::finite_count)
        .def_property_readonly("largest", [](const Format& f) { return encode(f, largest(f)); })
        .def_property_readonly("smallest", [](const Format& f) { return encode(f, smallest(f)); })
        .def("__eq__", &Format::operator==)
        .def("__repr__", [](const Format& f) { return "Format(" + f.name() + ")"; });

    m.def("round", [](const Format& f, const py::handle& x) { return encode(f, to_fp(f, x)); },
          "round a Python number or code to the nearest float, ties to even");
    m.def("to_float", [](const Format& f, const std::string& s) { return to_double(f, decode(f, s)); });
    m.def("show", [](const Format& f, const std::string& s) { return show(f, decode(f, s)); });
    m.def("add", [](const Format& f, const py::handle& x, const py::handle& y) {
        return encode(f, add(f, to_fp(f, x), to_fp(f, y)));
    });
    m.def("mul", [](const Format& f, const py::handle& x, const py::handle& y) {
        return encode(f, mul(f, to_fp(f, x), to_fp(f, y)));
    });
    m.def("floats", [](const Format& f, const py::handle& lo, const py::handle& hi) {
        return codes(f, enumerate(f, to_fp(f, lo), to_fp(f, hi)));
    }, "every float of the format in [lo, hi], ascending");

    m.def("activation_names", &Activation::names);
    m.def("activation", [](const Format& f, const std::string& name, const py::handle& x) {
        return encode(f, (*Activation::make(f, name))(to_fp(f, x)));
    });
    m.def("check_condition", [](const Format& f, const std::string& name) {
        auto act = Activation::make(f, name);
        ConditionReport r = check_condition(*act);
        py::dict d;
        d["ok"] = r.ok;
        d["failed"] = r.failed;
        d["reason"] = r.reason;
        if (r.witness) {
            const Witness& w = *r.witness;
            d["c1"] = encode(f, w.c1);
            d["c2"] = encode(f, w.c2);
            d["K"] = encode(f, w.K);
            d["eta"] = encode(f, w.eta);
            d["eta_plus"] = encode(f, w.eta_plus);
            d["witness"] = witness_text(f, w);
        }
        return d;
    });

    py::class_<Table>(m, "Table")
        .def_readonly("fmt", &Table::fmt)
        .def_readonly("dim", &Table::dim)
        .def_property_readonly("lo", [](const Table& t) { return encode(t.fmt, t.lo); })
        .def_property_readonly("hi", [](const Table& t) { return encode(t.fmt, t.hi); })
        .def_property_readonly("points", &Table::points)
        .def("grid", [](const Table& t) { return codes(t.fmt, t.grid); })
        .def("at", [](const Table& t, const py::sequence& x) { return encode(t.fmt, t.at(to_point(t.fmt, x))); })
        .def("image", [](const Table& t, const py::sequence& b) {
            py::list r = box_out(t.fmt, Box{direct_image(t, to_box(t.fmt, b))});
            return py::object(r[0]);
        }, "tightest interval containing the target over a box")
        .def("to_text", &table_to_text)
        .def_static("from_text", &table_from_text)
        .def_static("from_function", [](const Format& f, size_t d, const py::handle& lo, const py::handle& hi,
                                        const py::function& fn) {
            return Table::from_function(f, d, to_fp(f, lo), to_fp(f, hi), [&](const std::vector<Fp>& x) {
                return to_fp(f, fn(codes(f, x)));
            });
        }, py::arg("fmt"), py::arg("dim"), py::arg("lo"), py::arg("hi"), py::arg("fn"),
           "tabulate fn, which receives a list of codes and returns a code or number")
        .def_static("random", [](const Format& f, size_t d, const py::handle& lo, const py::handle& hi, uint64_t seed,
                                 size_t pieces) {
            if (pieces) return random_blocky_table(f, d, to_fp(f, lo), to_fp(f, hi), pieces, seed);
            return random_table(f, d, to_fp(f, lo), to_fp(f, hi), seed);
        }, py::arg("fmt"), py::arg("dim"), py::arg("lo"), py::arg("hi"), py::arg("seed") = 0, py::arg("pieces") = 0);

    py::class_<Network>(m, "Network")
        .def_property_readonly("fmt", &Network::fmt)
        .def_property_readonly("activation", &Network::activation_name)
        .def_property_readonly("in_dim", &Network::in_dim)
        .def_property_readonly("out_dim", &Network::out_dim)
        .def_property_readonly("depth", &Network::depth)
        .def_property_readonly("neurons", &Network::neuron_count)
        .def_property_readonly("weights", &Network::weight_count)
        .def("eval", [](const Network& n, const py::sequence& x) {
            return codes(n.fmt(), n.eval(to_point(n.fmt(), x)));
        })
        .def("eval_interval", [](const Network& n, const py::sequence& b) {
            return box_out(n.fmt(), n.eval_interval(to_box(n.fmt(), b)));
        }, "interval semantics; each output is (lo, hi) or None for Top")
        .def("to_text", &network_to_text)
        .def_static("from_text", &network_from_text);

    m.def("relu_min_network", &relu_min_network);
    m.def("random_network", &random_network, py::arg("fmt"), py::arg("activation"), py::arg("in_dim"),
          py::arg("depth"), py::arg("width"), py::arg("seed") = 0);

    py::class_<Program>(m, "Program")
        .def_readonly("fmt", &Program::fmt)
        .def_readonly("arity", &Program::arity)
        .def_property_readonly("size", [](const Program& p) { return p.code.size(); })
        .def("run", [](const Program& p, const py::sequence& x) { return codes(p.fmt, run_program(p, to_point(p.fmt, x))); })
        .def("run_interval", [](const Program& p, const py::sequence& b) {
            return box_out(p.fmt, run_program_interval(p, to_box(p.fmt, b)));
        })
        .def("to_text", &program_to_text)
        .def_static("from_text", &program_from_text);

    m.def("compile_to_program", py::overload_cast<const Network&>(&compile_to_program));

    m.def("synthesize_iua", [](const std::string& activation, const Table& t) {
        py::gil_scoped_release nogil;
        auto kit = kit_for(t.fmt, activation, t.lo, t.hi);
        return synthesize_iua(*kit, t);
    }, py::arg("activation"), py::arg("target"), "network whose interval semantics equals the target's direct image");
    m.def("synthesize_program", [](const Table& t) {
        py::gil_scoped_release nogil;
        return synthesize_program(t);
    }, py::arg("target"), "straight-line add/mul/const program for a target over the full finite range");

    m.def("check_iua", [](const Network& n, const Table& t, size_t samples, uint64_t seed) {
        OracleReport r;
        {
            py::gil_scoped_release nogil;
            auto boxes = boxes_for(t, samples, seed);
            r = check_iua(n, t, boxes);
        }
        return report_dict(r);
    }, py::arg("net"), py::arg("target"), py::arg("samples") = 0, py::arg("seed") = 0,
       "compare interval outputs with the direct image; samples=0 enumerates every box");
    m.def("check_pointwise", [](const Network& n, const Table& t) { return report_dict(check_pointwise(n, t)); });
    m.def("check_program", [](const Program& p, const Table& t, size_t samples, uint64_t seed) {
        OracleReport r;
        {
            py::gil_scoped_release nogil;
            auto boxes = boxes_for(t, samples, seed);
            r = check_program(p, t, boxes);
        }
        return report_dict(r);
    }, py::arg("program"), py::arg("target"), py::arg("samples") = 0, py::arg("seed") = 0);

    py::class_<Classifier>(m, "Classifier")
        .def(py::init([](const std::vector<Table>& scores, const py::handle& delta, const py::sequence& anchors) {
            if (scores.empty()) throw Error("classifier needs at least one score table");
            Classifier c;
            c.scores = scores;
            for (const auto& t : scores)
                if (!(t.fmt == scores[0].fmt) || t.dim != scores[0].dim || t.lo != scores[0].lo || t.hi != scores[0].hi)
                    throw Error("score tables must share format and grid");
            const Format& f = scores[0].fmt;
            c.delta = to_fp(f, delta);
            for (auto a : anchors) c.anchors.push_back(to_point(f, a.cast<py::sequence>()));
            return c;
        }), py::arg("scores"), py::arg("delta"), py::arg("anchors"), "one score table per class on a common grid")
        .def_property_readonly("fmt", &Classifier::fmt)
        .def_property_readonly("dim", &Classifier::dim)
        .def_property_readonly("n_classes", &Classifier::n_classes)
        .def_property_readonly("delta", [](const Classifier& c) { return encode(c.fmt(), c.delta); })
        .def_property_readonly("anchors", [](const Classifier& c) {
            std::vector<std::vector<std::string>> r;
            for (const auto& a : c.anchors) r.push_back(codes(c.fmt(), a));
            return r;
        })
        .def("classify", [](const Classifier& c, const py::sequence& x) { return classify(c.eval(to_point(c.fmt(), x))); })
        .def("is_robust", &is_robust)
        .def("to_text", &classifier_to_text)
        .def_static("from_text", &classifier_from_text);

    m.def("classify", [](const Network& n, const py::sequence& x) { return classify(n.eval(to_point(n.fmt(), x))); },
          "index of the largest output, lowest index on ties");
    m.def("synthesize_robust", [](const Classifier& c, const std::string& activation) {
        py::gil_scoped_release nogil;
        const Table& t = c.scores.at(0);
        auto kit = kit_for(c.fmt(), activation, t.lo, t.hi);
        return synthesize_robust(c, *kit);
    }, py::arg("classifier"), py::arg("activation") = "relu");
    m.def("is_provably_robust", [](const Network& n, const Classifier& c) {
        const Table& t = c.scores.at(0);
        return is_provably_robust(n, c.delta, c.anchors, t.lo, t.hi);
    }, py::arg("net"), py::arg("classifier"), "interval certification of every anchor neighbourhood");
}

#include "fpiua/io.hpp"

#include <fstream>
#include <sstream>

namespace fpiua {

namespace {

// Dense layers stay readable; large sparse layers would not fit.
constexpr size_t kDenseLimit = 4096;

struct Lines {
    std::vector<std::string> v;
    size_t i = 0;
    explicit Lines(const std::string& s)
    {
        std::istringstream in(s);
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            size_t h = line.find('#');
            if (h != std::string::npos) line.erase(h);
            if (line.find_first_not_of(" \t") == std::string::npos) continue;
            v.push_back(line);
        }
    }
    bool done() const { return i >= v.size(); }
    const std::string& next()
    {
        if (done()) throw Error("unexpected end of file");
        return v[i++];
    }
    std::vector<std::string> words() { return split(next()); }
    static std::vector<std::string> split(const std::string& s)
    {
        std::istringstream in(s);
        std::vector<std::string> w;
        std::string t;
        while (in >> t) w.push_back(t);
        return w;
    }
    // "key value..." with the key checked
    std::vector<std::string> keyed(const std::string& key)
    {
        auto w = words();
        if (w.empty() || w[0] != key) throw Error("expected '" + key + "'");
        w.erase(w.begin());
        return w;
    }
    std::string one(const std::string& key)
    {
        auto w = keyed(key);
        if (w.size() != 1) throw Error("'" + key + "' takes one value");
        return w[0];
    }
};

size_t to_size(const std::string& s)
{
    size_t pos = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(s, &pos);
    } catch (...) {
        throw Error("bad integer '" + s + "'");
    }
    if (pos != s.size()) throw Error("bad integer '" + s + "'");
    return size_t(v);
}

void header(Lines& L, const std::string& magic)
{
    auto w = L.words();
    if (w.size() != 2 || w[0] != magic) throw Error("not a " + magic + " file");
    if (w[1] != "1") throw Error("unsupported " + magic + " version " + w[1]);
}

std::string join_point(const Format& f, const std::vector<Fp>& x)
{
    std::string s;
    for (size_t i = 0; i < x.size(); ++i) s += (i ? "," : "") + encode(f, x[i]);
    return s;
}

std::vector<Fp> split_point(const Format& f, const std::string& s)
{
    std::vector<Fp> x;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, ',')) {
        auto w = Lines::split(cur);
        if (w.size() != 1) throw Error("bad point '" + s + "'");
        x.push_back(decode(f, w[0]));
    }
    return x;
}

void write_grid(std::ostringstream& o, const Table& t)
{
    o << "format " << t.fmt.name() << "\n";
    o << "dim " << t.dim << "\n";
    o << "domain " << encode(t.fmt, t.lo) << " " << encode(t.fmt, t.hi) << "\n";
}

Table read_grid(Lines& L)
{
    Format f = Format::parse(L.one("format"));
    size_t d = to_size(L.one("dim"));
    auto dom = L.keyed("domain");
    if (dom.size() != 2) throw Error("domain takes two floats");
    return Table(f, d, decode(f, dom[0]), decode(f, dom[1]));
}

// "x1,...,xd -> y1,...,yn"
std::pair<std::vector<Fp>, std::vector<Fp>> read_mapping(const Format& f, const std::string& line)
{
    size_t a = line.find("->");
    if (a == std::string::npos) throw Error("expected 'x -> y' line");
    return {split_point(f, line.substr(0, a)), split_point(f, line.substr(a + 2))};
}

} // namespace

std::string network_to_text(const Network& n)
{
    const Format& f = n.fmt();
    std::ostringstream o;
    o << "fpnn 1\n";
    o << "format " << f.name() << "\n";
    o << "activation " << n.activation_name() << "\n";
    o << "no_first_affine " << (n.no_first_affine ? 1 : 0) << "\n";
    o << "no_last_affine " << (n.no_last_affine ? 1 : 0) << "\n";
    o << "input " << n.in_dim() << "\n";
    o << "layers " << n.layers.size() << "\n";
    for (size_t li = 0; li < n.layers.size(); ++li) {
        const Layer& l = n.layers[li];
        bool dense = l.rows.size() * l.in_dim <= kDenseLimit;
        o << "layer " << (dense ? "dense " : "sparse ") << l.rows.size() << " " << l.in_dim << "\n";
        if (dense) {
            auto W = n.dense_weights(li);
            for (const auto& row : W) {
                for (size_t j = 0; j < row.size(); ++j) o << (j ? " " : "") << encode(f, row[j]);
                o << "\n";
            }
            o << "b";
            for (const Row& r : l.rows) o << " " << encode(f, r.bias);
            o << "\n";
        } else {
            for (const Row& r : l.rows) {
                o << encode(f, r.bias) << " " << r.terms.size();
                for (auto [c, w] : r.terms) o << " " << c << ":" << encode(f, w);
                o << "\n";
            }
        }
    }
    return o.str();
}

Network network_from_text(const std::string& s)
{
    Lines L(s);
    header(L, "fpnn");
    Format f = Format::parse(L.one("format"));
    std::string act = L.one("activation");
    bool nf = to_size(L.one("no_first_affine")) != 0;
    bool nl = to_size(L.one("no_last_affine")) != 0;
    size_t in = to_size(L.one("input"));
    size_t nlayers = to_size(L.one("layers"));
    Network n(f, act, in);
    n.no_first_affine = nf;
    n.no_last_affine = nl;
    for (size_t li = 0; li < nlayers; ++li) {
        auto w = L.keyed("layer");
        if (w.size() != 3) throw Error("layer line needs kind, rows, columns");
        size_t rows = to_size(w[1]), cols = to_size(w[2]);
        if (w[0] == "dense") {
            std::vector<std::vector<Fp>> W(rows);
            for (size_t i = 0; i < rows; ++i) {
                auto ws = L.words();
                if (ws.size() != cols) throw Error("dense row has wrong length");
                for (const auto& t : ws) W[i].push_back(decode(f, t));
            }
            auto bs = L.keyed("b");
            if (bs.size() != rows) throw Error("bias vector has wrong length");
            std::vector<Fp> b;
            for (const auto& t : bs) b.push_back(decode(f, t));
            Layer l = Network::dense_layer(W, b);
            l.in_dim = cols;
            n.layers.push_back(std::move(l));
        } else if (w[0] == "sparse") {
            Layer l;
            l.in_dim = cols;
            for (size_t i = 0; i < rows; ++i) {
                auto ws = L.words();
                if (ws.size() < 2) throw Error("sparse row needs bias and term count");
                Row r;
                r.bias = decode(f, ws[0]);
                size_t k = to_size(ws[1]);
                if (ws.size() != k + 2) throw Error("sparse row has wrong term count");
                for (size_t t = 0; t < k; ++t) {
                    size_t colon = ws[t + 2].find(':');
                    if (colon == std::string::npos) throw Error("bad sparse term");
                    r.terms.push_back({uint32_t(to_size(ws[t + 2].substr(0, colon))), decode(f, ws[t + 2].substr(colon + 1))});
                }
                l.rows.push_back(std::move(r));
            }
            n.layers.push_back(std::move(l));
        } else {
            throw Error("unknown layer kind '" + w[0] + "'");
        }
    }
    if (!L.done()) throw Error("trailing content after last layer");
    n.validate();
    return n;
}

std::string program_to_text(const Program& p)
{
    std::ostringstream o;
    o << "fpsl 1\n";
    o << "format " << p.fmt.name() << "\n";
    o << "arity " << p.arity << "\n";
    o << "code " << p.code.size() << "\n";
    for (const Instr& in : p.code) {
        switch (in.op) {
        case Op::Const: o << "const " << encode(p.fmt, in.c) << "\n"; break;
        case Op::Add: o << "add " << in.a << " " << in.b << "\n"; break;
        case Op::Mul: o << "mul " << in.a << " " << in.b << "\n"; break;
        }
    }
    o << "outputs";
    for (uint32_t s : p.outputs) o << " " << s;
    o << "\n";
    return o.str();
}

Program program_from_text(const std::string& s)
{
    Lines L(s);
    header(L, "fpsl");
    Program p;
    p.fmt = Format::parse(L.one("format"));
    p.arity = to_size(L.one("arity"));
    size_t k = to_size(L.one("code"));
    for (size_t i = 0; i < k; ++i) {
        auto w = L.words();
        if (w.size() == 2 && w[0] == "const") {
            p.code.push_back({Op::Const, 0, 0, decode(p.fmt, w[1])});
        } else if (w.size() == 3 && (w[0] == "add" || w[0] == "mul")) {
            p.code.push_back({w[0] == "add" ? Op::Add : Op::Mul, uint32_t(to_size(w[1])), uint32_t(to_size(w[2])), {}});
        } else {
            throw Error("bad instruction");
        }
    }
    for (const auto& t : L.keyed("outputs")) p.outputs.push_back(uint32_t(to_size(t)));
    if (!L.done()) throw Error("trailing content after outputs");
    p.validate();
    return p;
}

std::string table_to_text(const Table& t)
{
    std::ostringstream o;
    o << "fptable 1\n";
    write_grid(o, t);
    for (size_t k = 0; k < t.points(); ++k) o << join_point(t.fmt, t.point(k)) << " -> " << encode(t.fmt, t.values[k]) << "\n";
    return o.str();
}

Table table_from_text(const std::string& s)
{
    Lines L(s);
    header(L, "fptable");
    Table t = read_grid(L);
    std::vector<bool> seen(t.points(), false);
    size_t count = 0;
    while (!L.done()) {
        auto [x, y] = read_mapping(t.fmt, L.next());
        if (y.size() != 1 || y[0].is_nan()) throw Error("table value must be a single non-NaN float");
        if (x.size() != t.dim) throw Error("table point has wrong dimension");
        std::vector<size_t> idx;
        for (Fp v : x) {
            long g = t.grid_index(v);
            if (g < 0) throw Error("table point outside the domain");
            idx.push_back(size_t(g));
        }
        size_t k = t.flat(idx);
        if (seen[k]) throw Error("duplicate table point");
        seen[k] = true;
        t.values[k] = y[0];
        ++count;
    }
    if (count != t.points()) throw Error("table is not total on its grid");
    return t;
}

std::string classifier_to_text(const Classifier& c)
{
    std::ostringstream o;
    const Format& f = c.fmt();
    o << "fpcls 1\n";
    write_grid(o, c.scores.at(0));
    o << "classes " << c.n_classes() << "\n";
    o << "delta " << encode(f, c.delta) << "\n";
    o << "anchors " << c.anchors.size() << "\n";
    for (const auto& a : c.anchors) o << join_point(f, a) << "\n";
    const Table& t0 = c.scores[0];
    for (size_t k = 0; k < t0.points(); ++k) {
        std::vector<Fp> y;
        for (const auto& s : c.scores) y.push_back(s.values[k]);
        o << join_point(f, t0.point(k)) << " -> " << join_point(f, y) << "\n";
    }
    return o.str();
}

Classifier classifier_from_text(const std::string& s)
{
    Lines L(s);
    header(L, "fpcls");
    Table grid = read_grid(L);
    const Format f = grid.fmt;
    Classifier c;
    size_t n = to_size(L.one("classes"));
    if (n == 0) throw Error("classifier needs at least one class");
    c.scores.assign(n, grid);
    c.delta = decode(f, L.one("delta"));
    size_t na = to_size(L.one("anchors"));
    for (size_t i = 0; i < na; ++i) {
        auto a = split_point(f, L.next());
        if (a.size() != grid.dim) throw Error("anchor has wrong dimension");
        c.anchors.push_back(a);
    }
    std::vector<bool> seen(grid.points(), false);
    size_t count = 0;
    while (!L.done()) {
        auto [x, y] = read_mapping(f, L.next());
        if (x.size() != grid.dim || y.size() != n) throw Error("classifier line has wrong shape");
        std::vector<size_t> idx;
        for (Fp v : x) {
            long g = grid.grid_index(v);
            if (g < 0) throw Error("classifier point outside the domain");
            idx.push_back(size_t(g));
        }
        size_t k = grid.flat(idx);
        if (seen[k]) throw Error("duplicate classifier point");
        seen[k] = true;
        ++count;
        for (size_t i = 0; i < n; ++i) {
            if (y[i].is_nan()) throw Error("classifier score is NaN");
            c.scores[i].values[k] = y[i];
        }
    }
    if (count != grid.points()) throw Error("classifier is not total on its grid");
    return c;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::ostringstream o;
    o << in.rdbuf();
    return o.str();
}

void write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << text;
    if (!out) throw Error("write failed for " + path);
}

} // namespace fpiua

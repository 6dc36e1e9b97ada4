#include "config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "oflm/digest.hpp"

namespace oflm::lab {

using json = nlohmann::json;

namespace {

std::string child(const std::string& ptr, const std::string& key) {
    std::string esc;
    for (char ch : key) {
        if (ch == '~') esc += "~0";
        else if (ch == '/') esc += "~1";
        else esc += ch;
    }
    return ptr + "/" + esc;
}

std::string child(const std::string& ptr, std::size_t i) { return ptr + "/" + std::to_string(i); }

[[noreturn]] void schema(const std::string& ptr, const std::string& what) {
    throw SchemaError((ptr.empty() ? std::string("/") : ptr) + ": " + what);
}

[[noreturn]] void invalid(const std::string& ptr, const std::string& what) {
    throw ValidationError((ptr.empty() ? std::string("/") : ptr) + ": " + what);
}

void only_keys(const json& j, const std::string& ptr, std::initializer_list<const char*> keys) {
    if (!j.is_object()) schema(ptr, "expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; }))
            schema(child(ptr, it.key()), "unknown field");
    }
}

const json* find(const json& j, const char* key) {
    auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

const json& need(const json& j, const std::string& ptr, const char* key) {
    const json* v = find(j, key);
    if (!v) schema(child(ptr, key), "missing field");
    return *v;
}

double number(const json& j, const std::string& ptr) {
    if (!j.is_number()) schema(ptr, "expected a number");
    return j.get<double>();
}

std::size_t count(const json& j, const std::string& ptr) {
    if (!j.is_number_integer() && !j.is_number_unsigned()) schema(ptr, "expected a non-negative integer");
    const auto v = j.get<long long>();
    if (v < 0) schema(ptr, "expected a non-negative integer");
    return static_cast<std::size_t>(v);
}

bool boolean(const json& j, const std::string& ptr) {
    if (!j.is_boolean()) schema(ptr, "expected true or false");
    return j.get<bool>();
}

std::string text(const json& j, const std::string& ptr) {
    if (!j.is_string()) schema(ptr, "expected a string");
    return j.get<std::string>();
}

// A bare number is a vector of length one.
Vec vector(const json& j, const std::string& ptr) {
    if (j.is_number()) return Vec::Constant(1, j.get<double>());
    if (!j.is_array() || j.empty()) schema(ptr, "expected a non-empty array of numbers");
    Vec v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number(j[i], child(ptr, i));
    return v;
}

std::vector<double> list(const json& j, const std::string& ptr) {
    const Vec v = vector(j, ptr);
    return {v.data(), v.data() + v.size()};
}

// A bare number is a 1 x 1 matrix; otherwise an array of equal-length rows.
Mat matrix(const json& j, const std::string& ptr) {
    if (j.is_number()) return Mat::Constant(1, 1, j.get<double>());
    if (!j.is_array() || j.empty()) schema(ptr, "expected a matrix (array of rows)");
    const std::size_t rows = j.size();
    std::size_t cols = 0;
    for (std::size_t i = 0; i < rows; ++i) {
        if (!j[i].is_array() || j[i].empty()) schema(child(ptr, i), "expected a row array");
        if (i == 0) cols = j[i].size();
        else if (j[i].size() != cols) schema(child(ptr, i), "ragged row");
    }
    Mat m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t k = 0; k < cols; ++k)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = number(j[i][k], child(child(ptr, i), k));
    return m;
}

void square(const Mat& m, Eigen::Index p, const std::string& ptr) {
    if (m.rows() != p || m.cols() != p) {
        std::ostringstream os;
        os << "expected " << p << " x " << p << ", got " << m.rows() << " x " << m.cols();
        invalid(ptr, os.str());
    }
}

std::vector<std::pair<double, double>> pairs(const json& j, const std::string& ptr) {
    if (!j.is_array()) schema(ptr, "expected an array of [s, t] pairs");
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto p = child(ptr, i);
        if (!j[i].is_array() || j[i].size() != 2) schema(p, "expected [s, t]");
        out.emplace_back(number(j[i][0], child(p, 0)), number(j[i][1], child(p, 1)));
    }
    return out;
}

// u: array of u-sets; a u-set holds one p-vector per time.
std::vector<std::vector<Vec>> u_sets(const json& j, const std::string& ptr, std::size_t n_times, Eigen::Index p) {
    if (!j.is_array() || j.empty()) schema(ptr, "expected a non-empty array of u-sets");
    std::vector<std::vector<Vec>> out;
    for (std::size_t k = 0; k < j.size(); ++k) {
        const auto pk = child(ptr, k);
        if (!j[k].is_array()) schema(pk, "expected one vector per time");
        if (j[k].size() != n_times) invalid(pk, "needs one vector per time (" + std::to_string(n_times) + ")");
        std::vector<Vec> set;
        for (std::size_t i = 0; i < j[k].size(); ++i) {
            Vec v = vector(j[k][i], child(pk, i));
            if (v.size() != p) invalid(child(pk, i), "expected length " + std::to_string(p));
            set.push_back(std::move(v));
        }
        out.push_back(std::move(set));
    }
    return out;
}

// Library config errors raised while building objects get the pointer prepended.
template <class F>
auto build(const std::string& ptr, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const SchemaError&) {
        throw;
    } catch (const Error& e) {
        if (e.error_class() != ErrorClass::config) throw;
        invalid(ptr, e.what());
    } catch (const std::invalid_argument& e) {
        invalid(ptr, e.what());
    }
}

Tempering parse_tempering(const json& j, const std::string& ptr) {
    only_keys(j, ptr, {"kind", "param"});
    Tempering t;
    const auto kind = text(need(j, ptr, "kind"), child(ptr, "kind"));
    if (kind == "indicator") t.kind = Tempering::Kind::indicator;
    else if (kind == "exponential") t.kind = Tempering::Kind::exponential;
    else schema(child(ptr, "kind"), "expected \"indicator\" or \"exponential\"");
    t.param = number(need(j, ptr, "param"), child(ptr, "param"));
    if (!(t.param > 0.0)) invalid(child(ptr, "param"), "must be positive");
    return t;
}

LevyMeasure parse_measure(const json& j, const std::string& ptr, Eigen::Index q, bool& normalized) {
    if (!j.is_object()) schema(ptr, "expected an object");
    const auto kind = text(need(j, ptr, "kind"), child(ptr, "kind"));
    const auto flag = [&] {
        if (const json* n = find(j, "normalized")) normalized = boolean(*n, child(ptr, "normalized"));
    };
    if (kind == "discrete") {
        only_keys(j, ptr, {"kind", "atoms", "normalized"});
        flag();
        const std::string pa = child(ptr, "atoms");
        const json& atoms = need(j, ptr, "atoms");
        if (!atoms.is_array() || atoms.empty()) schema(pa, "expected a non-empty array");
        std::vector<Atom> out;
        for (std::size_t i = 0; i < atoms.size(); ++i) {
            const auto pi = child(pa, i);
            only_keys(atoms[i], pi, {"z", "w"});
            Atom a{vector(need(atoms[i], pi, "z"), child(pi, "z")), number(need(atoms[i], pi, "w"), child(pi, "w"))};
            if (a.z.size() != q) invalid(child(pi, "z"), "expected length " + std::to_string(q));
            out.push_back(std::move(a));
        }
        return build(pa, [&] { return LevyMeasure::discrete(std::move(out), q); });
    }
    if (kind == "gaussian") {
        only_keys(j, ptr, {"kind", "Sigma", "rate", "normalized"});
        flag();
        const Mat S = matrix(need(j, ptr, "Sigma"), child(ptr, "Sigma"));
        square(S, q, child(ptr, "Sigma"));
        const double rate = number(need(j, ptr, "rate"), child(ptr, "rate"));
        return build(ptr, [&] { return LevyMeasure::gaussian(S, rate); });
    }
    if (kind == "tempered") {
        only_keys(j, ptr, {"kind", "B", "atoms", "epsilon", "gaussian_small_jumps", "normalized"});
        flag();
        const Mat B = matrix(need(j, ptr, "B"), child(ptr, "B"));
        square(B, q, child(ptr, "B"));
        const std::string pa = child(ptr, "atoms");
        const json& atoms = need(j, ptr, "atoms");
        if (!atoms.is_array() || atoms.empty()) schema(pa, "expected a non-empty array");
        std::vector<SphereAtom> out;
        for (std::size_t i = 0; i < atoms.size(); ++i) {
            const auto pi = child(pa, i);
            only_keys(atoms[i], pi, {"theta", "weight", "tempering"});
            SphereAtom a;
            a.theta = vector(need(atoms[i], pi, "theta"), child(pi, "theta"));
            if (a.theta.size() != q) invalid(child(pi, "theta"), "expected length " + std::to_string(q));
            a.weight = number(need(atoms[i], pi, "weight"), child(pi, "weight"));
            if (const json* t = find(atoms[i], "tempering")) a.tempering = parse_tempering(*t, child(pi, "tempering"));
            out.push_back(std::move(a));
        }
        double eps = 1e-3;
        bool small = false;
        if (const json* e = find(j, "epsilon")) eps = number(*e, child(ptr, "epsilon"));
        if (const json* g = find(j, "gaussian_small_jumps")) small = boolean(*g, child(ptr, "gaussian_small_jumps"));
        return build(ptr, [&] { return LevyMeasure::tempered(B, std::move(out), eps, small); });
    }
    schema(child(ptr, "kind"), "expected \"discrete\", \"gaussian\" or \"tempered\"");
}

SimulationSection parse_simulation(const json& j, const std::string& ptr) {
    only_keys(j, ptr, {"replications", "margin", "half_width", "far_field", "window_budget", "format"});
    SimulationSection s;
    if (const json* v = find(j, "replications")) s.replications = count(*v, child(ptr, "replications"));
    if (const json* v = find(j, "margin")) s.options.margin = number(*v, child(ptr, "margin"));
    if (const json* v = find(j, "half_width")) s.options.half_width = number(*v, child(ptr, "half_width"));
    if (const json* v = find(j, "far_field")) s.options.far_field = boolean(*v, child(ptr, "far_field"));
    if (const json* v = find(j, "window_budget")) s.options.window_budget = number(*v, child(ptr, "window_budget"));
    if (const json* v = find(j, "format")) {
        const auto f = text(*v, child(ptr, "format"));
        if (f == "binary") s.binary = true;
        else if (f != "csv") schema(child(ptr, "format"), "expected \"csv\" or \"binary\"");
    }
    if (!(s.options.margin > 0.0)) invalid(child(ptr, "margin"), "must be positive");
    if (s.options.half_width && !(*s.options.half_width > 0.0)) invalid(child(ptr, "half_width"), "must be positive");
    if (!(s.options.window_budget > 0.0 && s.options.window_budget < 1.0))
        invalid(child(ptr, "window_budget"), "must lie in (0, 1)");
    return s;
}

LimitKind parse_kind(const json& j, const std::string& ptr, Representation rep) {
    const auto k = text(j, ptr);
    LimitKind kind;
    if (k == "ma_large") kind = LimitKind::ma_large;
    else if (k == "ma_local") kind = LimitKind::ma_local;
    else if (k == "rh_small") kind = LimitKind::rh_small;
    else if (k == "rh_large") kind = LimitKind::rh_large;
    else schema(ptr, "expected ma_large, ma_local, rh_small or rh_large");
    const bool ma = kind == LimitKind::ma_large || kind == LimitKind::ma_local;
    if (ma != (rep == Representation::moving_average)) invalid(ptr, "limit kind does not match the representation");
    return kind;
}

}  // namespace

std::string canonical_digest(const json& doc) { return sha256_hex(doc.dump()); }

ExperimentConfig parse_config(const json& doc) {
    only_keys(doc, "", {"schema_version", "model", "levy", "grid", "simulation", "covariance", "timerev", "limits",
                        "parseval", "comment"});
    const json& ver = need(doc, "", "schema_version");
    if (!ver.is_number_integer() || ver.get<int>() != kSchemaVersion)
        schema("/schema_version", "unsupported schema version (expected " + std::to_string(kSchemaVersion) + ")");

    ExperimentConfig cfg;
    cfg.digest = canonical_digest(doc);

    // model
    const json& model = need(doc, "", "model");
    if (!model.is_object()) schema("/model", "expected an object");
    const auto rep = text(need(model, "/model", "representation"), "/model/representation");
    if (rep == "moving_average") {
        cfg.representation = Representation::moving_average;
        only_keys(model, "/model", {"representation", "H", "M_plus", "M_minus", "M", "N"});
    } else if (rep == "harmonizable") {
        cfg.representation = Representation::harmonizable;
        only_keys(model, "/model", {"representation", "H", "A"});
    } else {
        schema("/model/representation", "expected \"moving_average\" or \"harmonizable\"");
    }
    cfg.H = matrix(need(model, "/model", "H"), "/model/H");
    const Eigen::Index p = cfg.H.rows();
    square(cfg.H, p, "/model/H");
    HurstSpec hs = build("/model/H", [&] { return make_hurst(cfg.H); });

    if (cfg.representation == Representation::moving_average) {
        const bool half = hs.report.regime == Regime::half_identity;
        const char* k1 = half ? "M" : "M_plus";
        const char* k2 = half ? "N" : "M_minus";
        const char* other = half ? "M_plus" : "M";
        if (find(model, other))
            invalid(child("/model", other), half ? "H = I/2 takes M and N" : "M and N are only for H = I/2");
        const Mat a = matrix(need(model, "/model", k1), child("/model", k1));
        const Mat b = matrix(need(model, "/model", k2), child("/model", k2));
        square(a, p, child("/model", k1));
        square(b, p, child("/model", k2));
        cfg.time = build("/model", [&] {
            return half ? TimeKernelParams::half(hs, a, b) : TimeKernelParams::general(hs, a, b);
        });
    } else {
        const json& A = need(model, "/model", "A");
        only_keys(A, "/model/A", {"re", "im"});
        const Mat re = matrix(need(A, "/model/A", "re"), "/model/A/re");
        square(re, p, "/model/A/re");
        Mat im = Mat::Zero(p, p);
        if (const json* v = find(A, "im")) {
            im = matrix(*v, "/model/A/im");
            square(im, p, "/model/A/im");
        }
        const CMat Ac = re.cast<cplx>() + cplx(0.0, 1.0) * im.cast<cplx>();
        cfg.fourier = build("/model/A", [&] { return FourierKernelParams::make(hs, Ac); });
    }

    // levy
    const Eigen::Index q = cfg.representation == Representation::moving_average ? p : 2 * p;
    LevyMeasure mu = parse_measure(need(doc, "", "levy"), "/levy", q, cfg.normalized);
    if (cfg.representation == Representation::moving_average) {
        cfg.mu = cfg.normalized ? build("/levy", [&] { return normalized_time(mu); }) : mu;
    } else {
        ComplexLevyView v = build("/levy", [&] { return ComplexLevyView::make(mu); });
        cfg.mu_c = cfg.normalized ? build("/levy", [&] { return normalized_fourier(v); }) : v;
    }

    if (const json* g = find(doc, "grid")) {
        cfg.grid = list(*g, "/grid");
        if (!std::is_sorted(cfg.grid.begin(), cfg.grid.end()) ||
            std::adjacent_find(cfg.grid.begin(), cfg.grid.end()) != cfg.grid.end())
            invalid("/grid", "times must be strictly increasing");
    }
    if (const json* s = find(doc, "simulation")) cfg.simulation = parse_simulation(*s, "/simulation");

    if (const json* c = find(doc, "covariance")) {
        only_keys(*c, "/covariance", {"pairs"});
        cfg.cov_pairs = pairs(need(*c, "/covariance", "pairs"), "/covariance/pairs");
    }

    if (const json* t = find(doc, "timerev")) {
        only_keys(*t, "/timerev", {"replications", "times", "u"});
        TimerevSection tr;
        if (const json* v = find(*t, "replications")) tr.replications = count(*v, "/timerev/replications");
        if (tr.replications > 0) {
            tr.times = list(need(*t, "/timerev", "times"), "/timerev/times");
            tr.u = u_sets(need(*t, "/timerev", "u"), "/timerev/u", tr.times.size(), p);
        } else if (find(*t, "times") || find(*t, "u")) {
            invalid("/timerev", "times and u are used only with replications > 0");
        }
        cfg.timerev = std::move(tr);
    }

    if (const json* l = find(doc, "limits")) {
        only_keys(*l, "/limits", {"kind", "scales", "replications", "times", "u", "direct"});
        LimitsSection ls;
        ls.kind = parse_kind(need(*l, "/limits", "kind"), "/limits/kind", cfg.representation);
        if (const json* v = find(*l, "scales")) ls.scales = list(*v, "/limits/scales");
        for (std::size_t i = 0; i < ls.scales.size(); ++i)
            if (!(ls.scales[i] > 0.0)) invalid(child("/limits/scales", i), "must be positive");
        ls.replications = count(need(*l, "/limits", "replications"), "/limits/replications");
        ls.times = list(need(*l, "/limits", "times"), "/limits/times");
        ls.u = u_sets(need(*l, "/limits", "u"), "/limits/u", ls.times.size(), p);
        if (const json* v = find(*l, "direct")) ls.direct = boolean(*v, "/limits/direct");
        cfg.limits = std::move(ls);
    }

    if (const json* pv = find(doc, "parseval")) {
        only_keys(*pv, "/parseval", {"pairs"});
        cfg.parseval_pairs = pairs(need(*pv, "/parseval", "pairs"), "/parseval/pairs");
    }
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError(path + ": cannot open config");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError(path + ": " + e.what());
    }
    return parse_config(doc);
}

}  // namespace oflm::lab

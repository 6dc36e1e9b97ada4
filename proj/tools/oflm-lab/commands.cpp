#include "commands.hpp"

#include <boost/version.hpp>

#include <chrono>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <variant>

#include "oflm/path_io.hpp"
#include "oflm/timerev.hpp"

#ifndef OFLM_VERSION_STRING
#define OFLM_VERSION_STRING "0.0.0"
#endif

namespace oflm::lab {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

json matrix_json(const Mat& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json r = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) r.push_back(m(i, k));
        rows.push_back(std::move(r));
    }
    return rows;
}

std::string stringify(const json& j) { return j.dump(2) + "\n"; }

struct Artifacts {
    fs::path dir;
    std::vector<std::string> files;

    std::ofstream open(const std::string& name, bool binary = false) {
        files.push_back(name);
        std::ofstream os(dir / name, binary ? std::ios::binary : std::ios::out);
        if (!os) throw std::runtime_error("cannot write " + (dir / name).string());
        return os;
    }
};

// scale,metric,value,se rows; an empty se means "not applicable".
struct MetricTable {
    struct Row {
        double scale;
        std::string metric;
        double value;
        std::optional<double> se;
    };
    std::vector<Row> rows;

    void add(double scale, std::string metric, double value, std::optional<double> se = {}) {
        rows.push_back({scale, std::move(metric), value, se});
    }
    void write(std::ostream& os, const std::string& digest) const {
        os << "# config_digest=" << digest << "\nscale,metric,value,se\n";
        for (const auto& r : rows) {
            os << format_double(r.scale) << ',' << r.metric << ',' << format_double(r.value) << ',';
            if (r.se) os << format_double(*r.se);
            os << '\n';
        }
    }
};

std::function<SamplePath(Rng&)> generator(const ExperimentConfig& cfg, const std::vector<double>& grid,
                                          const SimOptions& sim) {
    if (cfg.representation == Representation::moving_average) {
        auto s = std::make_shared<const MaSimulator>(*cfg.time, *cfg.mu, grid, sim);
        return [s](Rng& r) { return s->path(r); };
    }
    auto s = std::make_shared<const RhSimulator>(*cfg.fourier, *cfg.mu_c, grid, sim);
    return [s](Rng& r) { return s->path(r); };
}

SimOptions sim_options(const ExperimentConfig& cfg, const RunOptions& opt) {
    SimOptions sim = cfg.simulation ? cfg.simulation->options : SimOptions{};
    sim.quad = quad_for(opt.strict);
    return sim;
}

Mat model_covariance_grid(const ExperimentConfig& cfg, const std::vector<double>& times, const QuadOptions& q) {
    if (cfg.representation == Representation::moving_average)
        return time_isometry_grid(times, *cfg.time, second_moment(*cfg.mu), q);
    const ComplexMoments m = complex_moments(*cfg.mu_c);
    return fourier_isometry_grid(times, *cfg.fourier, m.S11, m.S22, q);
}

std::vector<double> negated(const std::vector<double>& g) {
    std::vector<double> out;
    for (auto it = g.rbegin(); it != g.rend(); ++it) out.push_back(-*it);
    return out;
}

// --- subcommands -------------------------------------------------------------

void cmd_validate(const ExperimentConfig& cfg, const RunOptions& opt, Artifacts& out) {
    const HurstSpec& hs = cfg.time ? cfg.time->hurst : cfg.fourier->hurst;
    json j;
    j["config_digest"] = cfg.digest;
    j["representation"] = cfg.representation == Representation::moving_average ? "moving_average" : "harmonizable";
    j["p"] = cfg.p();
    j["regime"] = to_string(hs.report.regime);
    json eig = json::array();
    for (const auto& e : hs.report.eigenvalues) eig.push_back({e.real(), e.imag()});
    j["hurst_eigenvalues"] = eig;
    j["condition_number"] = hs.report.condition_number;

    json m;
    if (cfg.mu) {
        const Mat S = second_moment(*cfg.mu);
        m["kind"] = cfg.mu->kind();
        m["activity"] = total_activity(*cfg.mu);
        m["second_moment"] = matrix_json(S);
        m["identity_second_moment"] = (S - Mat::Identity(S.rows(), S.cols())).cwiseAbs().maxCoeff() < 1e-9;
    } else {
        const ComplexMoments c = complex_moments(*cfg.mu_c);
        const Mat I = Mat::Identity(cfg.p(), cfg.p());
        m["kind"] = cfg.mu_c->base.kind();
        m["activity"] = total_activity(cfg.mu_c->base);
        m["S11"] = matrix_json(c.S11);
        m["S22"] = matrix_json(c.S22);
        m["S12"] = matrix_json(c.S12);
        m["fourier_normalized"] = std::max((4.0 * c.S11 - I).cwiseAbs().maxCoeff(),
                                           (4.0 * c.S22 - I).cwiseAbs().maxCoeff()) < 1e-9;
    }
    m["normalized_flag"] = cfg.normalized;
    j["measure"] = m;

    if (!cfg.grid.empty() && cfg.simulation) {
        const SimOptions sim = sim_options(cfg, opt);
        const Window w = cfg.representation == Representation::moving_average
                             ? MaSimulator(*cfg.time, *cfg.mu, cfg.grid, sim).window()
                             : RhSimulator(*cfg.fourier, *cfg.mu_c, cfg.grid, sim).window();
        j["window"] = {{"lo", w.lo},
                       {"hi", w.hi},
                       {"outside_fraction", w.outside_fraction},
                       {"budget", sim.window_budget},
                       {"within_budget", w.outside_fraction <= sim.window_budget},
                       {"far_field", sim.far_field}};
    }
    j["valid"] = true;
    out.open("validate.json") << stringify(j);
}

void cmd_simulate(const ExperimentConfig& cfg, const RunOptions& opt, Artifacts& out) {
    if (cfg.grid.empty()) throw ValidationError("/grid: simulate needs a time grid");
    if (!cfg.simulation || cfg.simulation->replications == 0)
        throw ValidationError("/simulation/replications: simulate needs replications > 0");
    const Ensemble ens = run_ensemble(cfg.simulation->replications, opt.seed, opt.threads,
                                      generator(cfg, cfg.grid, sim_options(cfg, opt)), cfg.digest);
    if (cfg.simulation->binary) {
        auto os = out.open("paths.bin", true);
        for (const auto& p : ens.paths) write_path_binary(os, p);
    } else {
        auto os = out.open("paths.csv");
        write_ensemble_csv(os, ens);
    }
}

void cmd_cov(const ExperimentConfig& cfg, const RunOptions& opt, Artifacts& out) {
    auto pairs = cfg.cov_pairs;
    if (pairs.empty()) {
        for (std::size_t a = 0; a < cfg.grid.size(); ++a)
            for (std::size_t b = a; b < cfg.grid.size(); ++b) pairs.emplace_back(cfg.grid[a], cfg.grid[b]);
    }
    if (pairs.empty()) throw ValidationError("/covariance/pairs: no (s, t) pairs and no grid");
    const QuadOptions q = quad_for(opt.strict);
    std::vector<std::vector<double>> rows;
    for (const auto& [s, t] : pairs) {
        const Mat c = cfg.representation == Representation::moving_average ? cov_maofLm(s, t, *cfg.time, *cfg.mu, q)
                                                                           : cov_rhofLm(s, t, *cfg.fourier, *cfg.mu_c, q);
        for (Eigen::Index i = 0; i < c.rows(); ++i)
            for (Eigen::Index k = 0; k < c.cols(); ++k)
                rows.push_back({s, t, static_cast<double>(i + 1), static_cast<double>(k + 1), c(i, k)});
    }
    auto os = out.open("cov.csv");
    write_table_csv(os, {"s", "t", "i", "j", "value"}, rows, cfg.digest);
}

json report_json(const ReversibilityReport& r) {
    json j{{"verdict", to_string(r.verdict)},
           {"condition_a_residual", r.condition_a_residual},
           {"condition_b_residual", r.condition_b_residual},
           {"caveats", r.caveats}};
    j["kernel_residual"] = r.kernel_residual ? json(*r.kernel_residual) : json(nullptr);
    return j;
}

void cmd_timerev(const ExperimentConfig& cfg, const RunOptions& opt, Artifacts& out) {
    const double tol = opt.strict ? 1e-12 : kReversibilityTol;
    json j;
    j["config_digest"] = cfg.digest;
    if (cfg.representation == Representation::moving_average) {
        const ReversibilityReport r = check_maofLm(*cfg.time, *cfg.mu, tol);
        j.update(report_json(r));
        if (cfg.time->variant == TimeKernelParams::Variant::general) {
            const ParametricCheck g = check_ofbm_time(cfg.time->M_plus, cfg.time->M_minus, cfg.time->hurst.D, tol);
            j["gaussian_check"] = {{"verdict", to_string(g.verdict)}, {"residual", g.residual}};
        }
    } else {
        const ReversibilityReport r = check_rhofLm(cfg.fourier->A, *cfg.mu_c, tol);
        j.update(report_json(r));
        const ParametricCheck g = check_ofbm_fourier(cfg.fourier->A, tol);
        j["gaussian_check"] = {{"verdict", to_string(g.verdict)}, {"residual", g.residual}};
    }
    if (cfg.timerev && cfg.timerev->replications > 0) {
        const auto& tr = *cfg.timerev;
        const SimOptions sim = sim_options(cfg, opt);
        const Ensemble fwd = run_ensemble(tr.replications, opt.seed, opt.threads, generator(cfg, tr.times, sim), cfg.digest);
        const Ensemble rev = time_reversed(run_ensemble(tr.replications, opt.seed + 1, opt.threads,
                                                        generator(cfg, negated(tr.times), sim), cfg.digest));
        const EmpiricalReversibility e = empirical_reversibility(fwd, rev, tr.times, tr.u);
        j["empirical"] = {{"replications", tr.replications},
                          {"discrepancies", e.discrepancies},
                          {"max_discrepancy", e.max_discrepancy},
                          {"ci", e.ci},
                          {"violation", e.violation}};
    }
    out.open("timerev.json") << stringify(j);
}

void cmd_limits(const ExperimentConfig& cfg, const RunOptions& opt, Artifacts& out) {
    if (!cfg.limits) throw ValidationError("/limits: section required");
    const LimitsSection& ls = *cfg.limits;
    const bool gaussian = ls.kind == LimitKind::ma_large || ls.kind == LimitKind::rh_small;
    const QuadOptions q = quad_for(opt.strict);
    const SimOptions sim = sim_options(cfg, opt);
    const bool ma = cfg.representation == Representation::moving_average;

    Mat target;
    std::vector<cplx> limit_chf;
    if (gaussian) {
        target = model_covariance_grid(cfg, ls.times, q);
    } else {
        for (const auto& u : ls.u)
            limit_chf.push_back(ma ? opstable_limit_chf(ls.times, u, cfg.ma_model(), false, q)
                                   : opstable_limit_chf(ls.times, u, cfg.rh_model(), false, q));
    }
    // The kurtosis prediction needs p = 1, a moving average and a finite fourth moment.
    const bool predict = ma && gaussian && cfg.p() == 1 &&
                         !std::holds_alternative<TemperedOpStable>(cfg.mu->variant());

    MetricTable table;
    for (std::size_t k = 0; k < ls.scales.size(); ++k) {
        const double c = ls.scales[k];
        if (ls.replications > 0) {
            RescaleRequest req;
            req.kind = ls.kind;
            req.scale = c;
            req.grid = ls.times;
            req.replications = ls.replications;
            req.seed = opt.seed + k;
            req.threads = opt.threads;
            req.sim = sim;
            req.direct = ls.direct;
            const Ensemble ens = ma ? rescaled_ensemble(req, cfg.ma_model()) : rescaled_ensemble(req, cfg.rh_model());
            if (gaussian) {
                const GaussianLimitDistance d = gaussian_limit_distance(ens, target, ls.times, ls.u);
                table.add(c, "cov_z", d.cov_z);
                table.add(c, "chf_distance", d.chf_distance, d.chf_ci);
                for (std::size_t i = 0; i < d.kurtosis.size(); ++i) {
                    const std::size_t ti = i / static_cast<std::size_t>(cfg.p());
                    const std::size_t xi = i % static_cast<std::size_t>(cfg.p());
                    table.add(c, "excess_kurtosis_t" + std::to_string(ti + 1) + "_x" + std::to_string(xi + 1),
                              d.kurtosis[i].value, d.kurtosis[i].se);
                }
            } else {
                const auto est = empirical_chf(ens, ls.times, ls.u);
                for (std::size_t i = 0; i < est.size(); ++i)
                    table.add(c, "chf_gap_u" + std::to_string(i + 1), std::abs(est[i].value - limit_chf[i]),
                              est[i].ci_radius);
            }
        }
        if (predict) {
            for (std::size_t ti = 0; ti < ls.times.size(); ++ti)
                table.add(c, "kurtosis_predicted_t" + std::to_string(ti + 1),
                          predicted_excess_kurtosis(cfg.ma_model(), ls.times[ti], c, q));
        }
    }
    auto os = out.open("limits.csv");
    table.write(os, cfg.digest);
}

void cmd_parseval(const ExperimentConfig& cfg, const RunOptions& opt, Artifacts& out) {
    if (cfg.representation != Representation::moving_average)
        throw ValidationError("/model/representation: parseval starts from a moving-average model with M_minus = 0");
    auto pairs = cfg.parseval_pairs;
    if (pairs.empty()) pairs.emplace_back(1.0, 2.0);
    const QuadOptions q = quad_for(opt.strict);
    std::vector<std::vector<double>> rows;
    for (const auto& [s, t] : pairs) rows.push_back({s, t, parseval_residual(s, t, *cfg.time, q).residual});
    auto os = out.open("parseval.csv");
    write_table_csv(os, {"s", "t", "residual"}, rows, cfg.digest);
}

void write_manifest(const std::string& sub, const ExperimentConfig& cfg, const RunOptions& opt, Artifacts& out,
                    double wall) {
    json m;
    m["tool"] = "oflm-lab";
    m["subcommand"] = sub;
    m["config"] = opt.config_path;
    m["config_digest"] = cfg.digest;
    m["seed"] = opt.seed;
    m["threads"] = opt.threads;
    m["tolerance_profile"] = opt.strict ? "strict" : "default";
    m["versions"] = {
        {"oflm", OFLM_VERSION_STRING},
        {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                      std::to_string(EIGEN_MINOR_VERSION)},
        {"boost", BOOST_LIB_VERSION},
        {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                              std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                              std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
        {"compiler", __VERSION__}};
    m["outputs"] = out.files;
    m["wall_time_s"] = wall;
    std::ofstream(out.dir / "manifest.json") << stringify(m);
}

}  // namespace

QuadOptions quad_for(bool strict) {
    QuadOptions q;
    if (strict) {
        q.abs_tol = 1e-12;
        q.global_tol = 1e-10;
    }
    return q;
}

void run(const std::string& sub, const ExperimentConfig& cfg, const RunOptions& opt) {
    using Fn = void (*)(const ExperimentConfig&, const RunOptions&, Artifacts&);
    static const std::map<std::string, Fn> table{{"validate", cmd_validate}, {"simulate", cmd_simulate},
                                                 {"cov", cmd_cov},           {"timerev", cmd_timerev},
                                                 {"limits", cmd_limits},     {"parseval", cmd_parseval}};
    const auto it = table.find(sub);
    if (it == table.end()) throw std::invalid_argument("unknown subcommand " + sub);

    const auto t0 = std::chrono::steady_clock::now();
    fs::create_directories(opt.out_dir);
    Artifacts out{opt.out_dir, {}};
    it->second(cfg, opt, out);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(sub, cfg, opt, out, wall);
}

}  // namespace oflm::lab

// oflm-lab: batch front end for the oflm library.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "commands.hpp"

namespace {

constexpr const char* kColumns = R"(Output columns (CSV files start with a "# config_digest=<sha256>" line):
  simulate  paths.csv     replication,t,X1..Xp      (paths.bin when simulation.format = "binary")
  cov       cov.csv       s,t,i,j,value             entry (i,j) of E X(s) X(t)^T, 1-based
  limits    limits.csv    scale,metric,value,se     metrics: cov_z, chf_distance (se = CI radius),
                                                    excess_kurtosis_t<k>_x<i>, kurtosis_predicted_t<k>,
                                                    chf_gap_u<k> (se = CI radius); empty se = n/a
  parseval  parseval.csv  s,t,residual
  validate  validate.json, timerev  timerev.json
Every run also writes manifest.json (config digest, seed, versions, wall time).

Exit codes: 0 ok, 2 configuration error, 3 numerical failure, 4 hypothesis violation.)";

struct Cli {
    std::string config;
    std::uint64_t seed = 0;
    std::string out = ".";
    unsigned threads = 0;
    std::string profile = "default";
};

void add_common(CLI::App* sub, Cli& cli) {
    sub->add_option("--config", cli.config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", cli.seed, "Master seed (U64)");
    sub->add_option("--out", cli.out, "Output directory (created if missing)");
    sub->add_option("--threads", cli.threads, "Worker cap; 0 = all cores. Falls back to OFLM_LAB_THREADS");
    sub->add_option("--tolerance-profile", cli.profile, "Quadrature tolerances")
        ->check(CLI::IsMember({"default", "strict"}));
}

unsigned env_threads() {
    const char* v = std::getenv("OFLM_LAB_THREADS");
    if (!v || !*v) return 0;
    char* end = nullptr;
    const unsigned long n = std::strtoul(v, &end, 10);
    if (*end != '\0') throw oflm::ValidationError(std::string("OFLM_LAB_THREADS: not an integer: ") + v);
    return static_cast<unsigned>(n);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"oflm-lab: simulate and check operator fractional Levy motion"};
    app.footer(kColumns);
    app.require_subcommand(1);

    Cli cli;
    const std::pair<const char*, const char*> subs[] = {
        {"validate", "Parse and check a config; report spectra, measure normalisation and window budget"},
        {"simulate", "Seeded Monte Carlo ensemble on the config grid"},
        {"cov", "Quadrature covariance at (s,t) pairs"},
        {"timerev", "Time-reversibility verdict (parametric, plus empirical if timerev.replications > 0)"},
        {"limits", "Scaling-limit experiment over limits.scales"},
        {"parseval", "Time vs Fourier covariance for the linked parameters (M_minus = 0)"},
    };
    for (const auto& [name, desc] : subs) add_common(app.add_subcommand(name, desc), cli);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    const std::string sub = app.get_subcommands().front()->get_name();
    try {
        oflm::lab::RunOptions opt;
        opt.seed = cli.seed;
        opt.out_dir = cli.out;
        opt.strict = cli.profile == "strict";
        opt.config_path = cli.config;
        opt.threads = app.get_subcommands().front()->count("--threads") ? cli.threads : env_threads();
        const auto cfg = oflm::lab::parse_config_file(cli.config);
        oflm::lab::run(sub, cfg, opt);
    } catch (const oflm::Error& e) {
        std::cerr << "oflm-lab " << sub << ": " << e.what() << '\n';
        return oflm::exit_code_for(e.error_class());
    } catch (const std::invalid_argument& e) {
        std::cerr << "oflm-lab " << sub << ": " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "oflm-lab " << sub << ": " << e.what() << '\n';
        return 1;
    }
    return 0;
}

// tqc: sweeps, acceptance checks and single-point reports for the
// Ising-XYZ diamond chain dimer.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <string>

#include "tqc/acceptance.hpp"
#include "tqc/errors.hpp"
#include "tqc/measures.hpp"
#include "tqc/model.hpp"
#include "tqc/sweep.hpp"

namespace {

enum Exit { kOk = 0, kConfig = 1, kAcceptance = 2, kIo = 3 };

struct SweepArgs {
    std::string preset, config, out;
    int points = tqc::sweep::kDefaultPresetPoints;
    int workers = 1;
    int oracle_every = 0;
    std::uint64_t seed = 0;
};

int run_sweep(const SweepArgs& a, const CLI::App& cmd) {
    if (a.preset.empty() == a.config.empty())
        throw tqc::ConfigError("give exactly one of --preset or --config");
    auto spec = a.config.empty() ? tqc::sweep::figure_preset(a.preset, a.points)
                                 : tqc::sweep::load_config(a.config);
    // Command-line flags override the config file only when given.
    if (a.config.empty() || cmd.count("--workers")) spec.workers = a.workers;
    if (a.config.empty() || cmd.count("--oracle-every")) spec.oracle_every = a.oracle_every;
    if (a.config.empty() || cmd.count("--seed")) spec.seed = a.seed;
    const auto result = tqc::sweep::run_sweep(spec);
    tqc::sweep::emit_csv(result, a.out);
    std::fprintf(stderr, "%zu rows, %zu psd flags -> %s\n", result.rows.size(), result.psd_flags,
                 a.out.c_str());
    return kOk;
}

int run_verify(const std::string& suite) {
    int failed = 0;
    for (int id : tqc::acceptance::suite(suite)) {
        const auto r = tqc::acceptance::run_criterion(id);
        std::printf("%s\n", tqc::acceptance::format(r).c_str());
        std::fflush(stdout);
        failed += !r.passed;
    }
    return failed == 0 ? kOk : kAcceptance;
}

int run_point(const tqc::ModelParams& p, double t) {
    const tqc::ThermalPoint tp(t);
    const auto c = tqc::correlators(p, tp);
    const auto state = tqc::dimer_density_matrix(c);
    const auto r = tqc::correlation_report(state.rho);
    auto kv = [](const char* k, double v) { std::printf("%s=%.12g\n", k, v); };
    kv("J0_over_J", p.j0);
    kv("T_over_J", t);
    kv("h_over_J", p.h);
    kv("gamma", p.gamma);
    kv("Jz_over_J", p.jz);
    kv("xx", c.xx);
    kv("yy", c.yy);
    kv("zz", c.zz);
    kv("z", c.z);
    kv("qd", r.qd);
    kv("qd_d1", r.d1);
    kv("qd_d2", r.d2);
    std::printf("qd_branch=%d\n", r.qd_branch);
    kv("tdd", r.tdd);
    std::printf("tdd_fallback=%d\n", r.tdd_branch.fallback ? 1 : 0);
    kv("concurrence", r.concurrence);
    kv("mutual_info", r.mutual_info);
    kv("entropy_ab", r.entropy_ab);
    kv("entropy_a", r.entropy_a);
    kv("rho_eig_min", state.min_eigenvalue);
    std::printf("psd_flag=%d\n", state.psd ? 0 : 1);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum correlations of the Ising-XYZ diamond chain dimer"};
    app.set_version_flag("--version", tqc::sweep::version());
    app.require_subcommand(1);

    SweepArgs sa;
    auto* sweep = app.add_subcommand("sweep", "run a parameter grid and write a CSV table");
    sweep->add_option("--preset", sa.preset, "figure preset (fig2a..fig5)");
    sweep->add_option("--config", sa.config, "INI sweep configuration");
    sweep->add_option("--out", sa.out, "output CSV path")->required();
    sweep->add_option("--points", sa.points, "points per continuous preset axis");
    sweep->add_option("--workers", sa.workers, "worker threads");
    sweep->add_option("--oracle-every", sa.oracle_every, "re-verify every K-th row (0 = off)");
    sweep->add_option("--seed", sa.seed, "seed for the optimizer starts");

    std::string suite = "all";
    auto* verify = app.add_subcommand("verify", "run acceptance checks");
    verify->add_option("--suite", suite, "psd, oracle, figures or all");

    tqc::ModelParams p;
    double t = 0.0;
    auto* point = app.add_subcommand("point", "print the correlation report of one point");
    point->set_help_flag("--help", "print this help message and exit");  // frees -h for the field
    point->add_option("--J0", p.j0)->required();
    point->add_option("--T", t)->required();
    point->add_option("--h", p.h)->required();
    point->add_option("--gamma", p.gamma)->required();
    point->add_option("--Jz", p.jz)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (*sweep) return run_sweep(sa, *sweep);
        if (*verify) return run_verify(suite);
        if (*point) {
            if (!(t > 0.0)) throw tqc::ConfigError("--T must be positive");
            return run_point(p, t);
        }
    } catch (const tqc::IoError& e) {
        std::fprintf(stderr, "I/O error: %s\n", e.what());
        return kIo;
    } catch (const tqc::ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return kConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kConfig;
    }
    return kOk;
}

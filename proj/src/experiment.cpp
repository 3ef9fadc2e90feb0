#include <random>

#include <fmt/format.h>

#include "mmlarma/harness.hpp"
#include "mmlarma/seeding.hpp"

namespace mmlarma {

namespace {

constexpr int kMaxDrawAttempts = 10000;

// Uniform on (-1,1)^k, rejected until every root lies outside the unit circle.
Eigen::VectorXd draw_region(int k, std::mt19937_64& rng, const char* what, const DgpSpec& spec) {
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    Eigen::VectorXd c(k);
    for (int attempt = 0; attempt < kMaxDrawAttempts; ++attempt) {
        for (int i = 0; i < k; ++i) c(i) = uniform(rng);
        if (is_stationary(c)) return c;
    }
    throw ArmaError(fmt::format("cannot draw a {} coefficient vector for ARMA({},{}) in {} attempts", what,
                                spec.order.p, spec.order.q, kMaxDrawAttempts));
}

std::string format_vector(const Eigen::VectorXd& v) {
    std::string out = "[";
    for (Index i = 0; i < v.size(); ++i) out += fmt::format("{}{:.6f}", i ? ", " : "", v(i));
    return out + "]";
}

}  // namespace

std::vector<DgpCombination> draw_dgp_combinations(const DgpSpec& spec, std::uint64_t master_seed) {
    if (spec.fixed) {
        if (!is_stationary(spec.fixed->phi) || !is_invertible(spec.fixed->theta))
            throw ArmaError("fixed DGP must be stationary and invertible");
        return {{"fixed", *spec.fixed}};
    }
    std::mt19937_64 rng(derive_seed(master_seed, {0xd6e}));
    const int ar_draws = spec.order.p > 0 ? spec.ar_draws : 1;
    const int ma_draws = spec.order.q > 0 ? spec.ma_draws : 1;
    std::vector<Eigen::VectorXd> phis;
    std::vector<Eigen::VectorXd> thetas;
    for (int i = 0; i < ar_draws; ++i) phis.push_back(draw_region(spec.order.p, rng, "stationary", spec));
    for (int j = 0; j < ma_draws; ++j) thetas.push_back(draw_region(spec.order.q, rng, "invertible", spec));

    std::vector<DgpCombination> combos;
    for (int i = 0; i < ar_draws; ++i)
        for (int j = 0; j < ma_draws; ++j)
            combos.push_back({fmt::format("phi{},theta{}", i + 1, j + 1), {phis[i], thetas[j], spec.sigma2}});
    return combos;
}

ExperimentReport run_simulated_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto combos = draw_dgp_combinations(cfg.dgp, cfg.master_seed);

    ExperimentReport report;
    report.name = cfg.name;
    report.kind = "simulated";
    report.metric = "mspe";
    report.seed = cfg.master_seed;
    report.config_json = experiment_config_to_json(cfg);
    for (const auto& c : combos)
        report.notes.push_back(fmt::format("{}: phi={} theta={} sigma2={:.6f}", c.label, format_vector(c.coeffs.phi),
                                           format_vector(c.coeffs.theta), c.coeffs.sigma2));

    std::vector<Dataset> datasets;
    for (int n : cfg.n_in) {
        for (int t : cfg.n_out) {
            for (std::size_t c = 0; c < combos.size(); ++c) {
                const std::size_t row = report.rows.size();
                report.rows.push_back({combos[c].label, n, t, {}});
                for (int r = 0; r < cfg.replications; ++r) {
                    const auto seed = derive_seed(cfg.master_seed, {1, static_cast<std::uint64_t>(n),
                                                                    static_cast<std::uint64_t>(t), c,
                                                                    static_cast<std::uint64_t>(r)});
                    const Eigen::VectorXd y = simulate(combos[c].coeffs, n + t, seed);
                    datasets.push_back({y.head(n), y.tail(t)});
                    report.records.push_back({row, static_cast<std::size_t>(r), {}});
                }
            }
        }
    }

    ComparisonOptions options{derive_seed(cfg.master_seed, {2}), cfg.jobs, cfg.refit_each_step};
    auto result = compare_criteria(datasets, cfg.grid, cfg.fit, cfg.mml, options);
    for (std::size_t i = 0; i < report.records.size(); ++i) report.records[i].outcome = std::move(result.outcomes[i]);

    for (std::size_t row = 0; row < report.rows.size(); ++row) {
        std::vector<DatasetOutcome> outcomes;
        for (const auto& rec : report.records)
            if (rec.row == row) outcomes.push_back(rec.outcome);
        report.rows[row].stats = summarize(outcomes);
    }
    return report;
}

}  // namespace mmlarma

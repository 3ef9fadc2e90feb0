#include "mmlarma/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "mmlarma/seeding.hpp"
#include "parallel.hpp"

namespace mmlarma {

CandidateGrid::CandidateGrid(int p_min, int p_max, int q_min, int q_max) {
    if (p_min < 0 || q_min < 0 || p_min > p_max || q_min > q_max) throw ArmaError("empty or invalid candidate grid");
    for (int p = p_min; p <= p_max; ++p)
        for (int q = q_min; q <= q_max; ++q) orders_.push_back({p, q});
}

CandidateGrid::CandidateGrid(std::vector<ArmaOrder> orders) : orders_(std::move(orders)) {
    if (orders_.empty()) throw ArmaError("empty or invalid candidate grid");
    for (const auto& o : orders_) o.validate();
}

CandidateGrid CandidateGrid::from_orders(std::vector<ArmaOrder> orders) { return CandidateGrid(std::move(orders)); }

int CandidateGrid::max_p() const {
    return std::max_element(orders_.begin(), orders_.end(), [](auto a, auto b) { return a.p < b.p; })->p;
}

int CandidateGrid::max_q() const {
    return std::max_element(orders_.begin(), orders_.end(), [](auto a, auto b) { return a.q < b.q; })->q;
}

PerCriterion<double> score_model(const FittedModel& model, const MmlConfig& mml_cfg) {
    PerCriterion<double> scores{};
    for (Criterion c : kAllCriteria) {
        scores[index_of(c)] = c == Criterion::MML87
                                  ? message_length(model, mml_cfg).value
                                  : penalized_criterion(c, model.loglik, model.order, 0, model.n_obs).value;
        if (!std::isfinite(scores[index_of(c)]))
            throw ArmaError(std::string(criterion_name(c)) + " score not finite");
    }
    return scores;
}

std::size_t pick_minimum(std::span<const CandidateResult> candidates, Criterion criterion) {
    if (candidates.empty()) throw ArmaError("no scorable model");
    const auto c = index_of(criterion);
    std::size_t best = 0;
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        const double a = candidates[i].scores[c];
        const double b = candidates[best].scores[c];
        if (a < b) {
            best = i;
        } else if (a == b) {
            const ArmaOrder oa = candidates[i].model.order;
            const ArmaOrder ob = candidates[best].model.order;
            if (oa.p + oa.q < ob.p + ob.q || (oa.p + oa.q == ob.p + ob.q && oa.p < ob.p)) best = i;
        }
    }
    return best;
}

SelectionResult rescore(std::vector<CandidateResult> candidates, std::vector<UnscorableCandidate> unscorable,
                        const MmlConfig& mml_cfg) {
    SelectionResult out;
    out.unscorable = std::move(unscorable);
    for (auto& cand : candidates) {
        try {
            cand.scores = score_model(cand.model, mml_cfg);
            out.candidates.push_back(std::move(cand));
        } catch (const ArmaError& e) {
            out.unscorable.push_back({cand.model.order, e.what()});
        }
    }
    if (out.candidates.empty()) throw ArmaError("no scorable model");
    for (Criterion c : kAllCriteria) out.chosen[index_of(c)] = pick_minimum(out.candidates, c);
    return out;
}

SelectionResult select(const Eigen::VectorXd& y, const CandidateGrid& grid, const FitConfig& fit_cfg,
                       const MmlConfig& mml_cfg) {
    std::vector<CandidateResult> fitted;
    std::vector<UnscorableCandidate> unscorable;
    const auto& orders = grid.orders();
    for (std::size_t i = 0; i < orders.size(); ++i) {
        FitConfig cfg = fit_cfg;
        cfg.seed = derive_seed(fit_cfg.seed, {static_cast<std::uint64_t>(orders[i].p),
                                              static_cast<std::uint64_t>(orders[i].q)});
        try {
            fitted.push_back({fit(y, orders[i], cfg), {}});
        } catch (const ArmaError& e) {
            unscorable.push_back({orders[i], e.what()});
        }
    }
    return rescore(std::move(fitted), std::move(unscorable), mml_cfg);
}

BacktestResult rolling_forecast(const Eigen::VectorXd& train, const Eigen::VectorXd& test, const FittedModel& model,
                                const BacktestOptions& options) {
    const Index n = train.size();
    const Index t_len = test.size();
    if (t_len < 1) throw ArmaError("test block must be nonempty");
    Eigen::VectorXd full(n + t_len);
    full << train, test;

    BacktestResult out;
    out.forecasts.resize(t_len);
    if (!options.refit_each_step) {
        // The residual recursion's one-step error is exactly y_t - yhat_t.
        const Eigen::VectorXd e = residuals_css(model.coeffs, full);
        out.forecasts = test - e.tail(t_len);
    } else {
        for (Index i = 0; i < t_len; ++i) {
            const Index t = n + i;
            const Eigen::VectorXd window = full.segment(t - n, n);
            FitConfig cfg = options.fit;
            cfg.seed = derive_seed(options.fit.seed, {static_cast<std::uint64_t>(i)});
            const FittedModel refit = fit(window, model.order, cfg);
            const Eigen::VectorXd e = residuals_css(refit.coeffs, full.head(t + 1));
            out.forecasts(i) = full(t) - e(t);
        }
    }
    out.squared_errors = (test - out.forecasts).array().square();
    out.mspe = out.squared_errors.mean();
    return out;
}

DatasetOutcome evaluate_dataset(const Dataset& dataset, const CandidateGrid& grid, const FitConfig& fit_cfg,
                                const MmlConfig& mml_cfg, bool refit_each_step) {
    DatasetOutcome out;
    try {
        const SelectionResult sel = select(dataset.train, grid, fit_cfg, mml_cfg);
        std::map<std::size_t, double> cache;
        BacktestOptions bt{refit_each_step, fit_cfg};
        for (Criterion c : kAllCriteria) {
            const std::size_t idx = sel.chosen[index_of(c)];
            auto it = cache.find(idx);
            if (it == cache.end())
                it = cache.emplace(idx, rolling_forecast(dataset.train, dataset.test, sel.candidates[idx].model, bt).mspe)
                         .first;
            out.chosen[index_of(c)] = sel.candidates[idx].model.order;
            out.mspe[index_of(c)] = it->second;
        }
        const double best = *std::min_element(out.mspe.begin(), out.mspe.end());
        for (std::size_t k = 0; k < kCriterionCount; ++k) out.winner[k] = out.mspe[k] == best;
        out.ok = true;
    } catch (const ArmaError& e) {
        out = DatasetOutcome{};
        out.failure = e.what();
    }
    return out;
}

ComparisonResult compare_criteria(std::span<const Dataset> datasets, const CandidateGrid& grid,
                                  const FitConfig& fit_cfg, const MmlConfig& mml_cfg,
                                  const ComparisonOptions& options) {
    if (datasets.empty()) throw ArmaError("compare_criteria needs at least one dataset");
    ComparisonResult result;
    result.outcomes.resize(datasets.size());
    detail::parallel_for(datasets.size(), options.jobs, [&](std::size_t i) {
        FitConfig cfg = fit_cfg;
        cfg.seed = derive_seed(options.master_seed, {static_cast<std::uint64_t>(i)});
        result.outcomes[i] = evaluate_dataset(datasets[i], grid, cfg, mml_cfg, options.refit_each_step);
    });
    result.stats = summarize(result.outcomes);
    return result;
}

CriterionStats summarize(std::span<const DatasetOutcome> outcomes, bool log_metric) {
    CriterionStats stats;
    PerCriterion<double> sum{};
    PerCriterion<double> sum_sq{};
    for (const auto& o : outcomes) {
        if (!o.ok) {
            ++stats.failures;
            continue;
        }
        ++stats.datasets;
        for (std::size_t k = 0; k < kCriterionCount; ++k) {
            if (o.winner[k]) ++stats.wins[k];
            sum[k] += log_metric ? std::log(o.mspe[k]) : o.mspe[k];
        }
    }
    for (std::size_t k = 0; k < kCriterionCount; ++k)
        stats.mean[k] = stats.datasets > 0 ? sum[k] / stats.datasets : 0.0;
    // Second pass for a numerically stable sample SD.
    for (const auto& o : outcomes) {
        if (!o.ok) continue;
        for (std::size_t k = 0; k < kCriterionCount; ++k) {
            const double v = (log_metric ? std::log(o.mspe[k]) : o.mspe[k]) - stats.mean[k];
            sum_sq[k] += v * v;
        }
    }
    for (std::size_t k = 0; k < kCriterionCount; ++k)
        stats.sd[k] = stats.datasets > 1 ? std::sqrt(sum_sq[k] / (stats.datasets - 1)) : 0.0;
    return stats;
}

}  // namespace mmlarma

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mmlarma/criteria.hpp"
#include "mmlarma/estimation.hpp"

namespace mmlarma {

/// Candidate (p,q) orders.  Defaults to p in 1..5, q in 0..5 (30 models).
class CandidateGrid {
public:
    CandidateGrid() : CandidateGrid(1, 5, 0, 5) {}
    CandidateGrid(int p_min, int p_max, int q_min, int q_max);

    static CandidateGrid from_orders(std::vector<ArmaOrder> orders);

    const std::vector<ArmaOrder>& orders() const { return orders_; }
    std::size_t size() const { return orders_.size(); }
    int max_p() const;
    int max_q() const;

private:
    explicit CandidateGrid(std::vector<ArmaOrder> orders);
    std::vector<ArmaOrder> orders_;
};

struct CandidateResult {
    FittedModel model;
    PerCriterion<double> scores{};
};

struct UnscorableCandidate {
    ArmaOrder order;
    std::string reason;
};

struct SelectionResult {
    PerCriterion<std::size_t> chosen{};  // index into candidates
    std::vector<CandidateResult> candidates;
    std::vector<UnscorableCandidate> unscorable;

    const FittedModel& model_for(Criterion c) const { return candidates[chosen[index_of(c)]].model; }
    ArmaOrder order_for(Criterion c) const { return model_for(c).order; }
};

/// All five scores for one fitted model; throws if any is undefined.
PerCriterion<double> score_model(const FittedModel& model, const MmlConfig& mml_cfg);

/// Index of the minimum-score candidate.  Ties go to smaller p + q, then
/// smaller p.
std::size_t pick_minimum(std::span<const CandidateResult> candidates, Criterion criterion);

/// Rescore already-fitted candidates under a different MML configuration.
SelectionResult rescore(std::vector<CandidateResult> candidates, std::vector<UnscorableCandidate> unscorable,
                        const MmlConfig& mml_cfg);

/// Fits every grid candidate once and picks the argmin of each criterion.
/// Candidates whose fit or scoring fails are dropped for every criterion.
SelectionResult select(const Eigen::VectorXd& y, const CandidateGrid& grid, const FitConfig& fit_cfg,
                       const MmlConfig& mml_cfg);

struct BacktestResult {
    double mspe = 0.0;
    Eigen::VectorXd squared_errors;
    Eigen::VectorXd forecasts;
};

struct BacktestOptions {
    bool refit_each_step = false;  // re-estimate on the trailing window before each forecast
    FitConfig fit;
};

/// One-step-ahead forecasts over the test block with the information set
/// rolling forward.  Coefficients stay frozen unless refit_each_step is set.
BacktestResult rolling_forecast(const Eigen::VectorXd& train, const Eigen::VectorXd& test, const FittedModel& model,
                                const BacktestOptions& options = {});

struct Dataset {
    Eigen::VectorXd train;
    Eigen::VectorXd test;
};

struct DatasetOutcome {
    bool ok = false;
    std::string failure;
    PerCriterion<ArmaOrder> chosen{};
    PerCriterion<double> mspe{};
    PerCriterion<bool> winner{};
};

struct CriterionStats {
    PerCriterion<int> wins{};
    PerCriterion<double> mean{};
    PerCriterion<double> sd{};
    int datasets = 0;  // successful datasets
    int failures = 0;
};

struct ComparisonOptions {
    std::uint64_t master_seed = 0;
    int jobs = 1;
    bool refit_each_step = false;
};

struct ComparisonResult {
    std::vector<DatasetOutcome> outcomes;  // same order as the input datasets
    CriterionStats stats;
};

/// Select and backtest every dataset; a criterion wins a dataset when its
/// chosen model attains the minimum MSPE of the five (ties share the win).
/// Per-dataset fit seeds derive from master_seed and the dataset index, so
/// results do not depend on jobs.
ComparisonResult compare_criteria(std::span<const Dataset> datasets, const CandidateGrid& grid,
                                  const FitConfig& fit_cfg, const MmlConfig& mml_cfg,
                                  const ComparisonOptions& options = {});

/// Per-dataset outcome in isolation (what compare_criteria runs per item).
DatasetOutcome evaluate_dataset(const Dataset& dataset, const CandidateGrid& grid, const FitConfig& fit_cfg,
                                const MmlConfig& mml_cfg, bool refit_each_step);

/// Win counts plus mean/sample-SD of metric(mspe) over successful outcomes.
CriterionStats summarize(std::span<const DatasetOutcome> outcomes, bool log_metric = false);

}  // namespace mmlarma

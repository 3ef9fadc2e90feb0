#pragma once

// Experiment drivers, CSV ingestion and report emission.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mmlarma/selection.hpp"

namespace mmlarma {

inline constexpr std::string_view kVersion = "0.1.0";

/// Data-generating process: fixed coefficients, or ar_draws x ma_draws
/// combinations sampled uniformly on (-1,1)^p x (-1,1)^q and rejected until
/// stationary and invertible.
struct DgpSpec {
    ArmaOrder order{1, 1};
    int ar_draws = 5;
    int ma_draws = 2;
    double sigma2 = 1.0;
    std::optional<ArmaCoefficients<double>> fixed;
};

struct ExperimentConfig {
    std::string name = "experiment";
    DgpSpec dgp;
    std::vector<int> n_in{100};
    std::vector<int> n_out{10};
    int replications = 100;
    CandidateGrid grid;
    std::uint64_t master_seed = 0;
    int jobs = 1;
    FitConfig fit;
    MmlConfig mml;
    bool refit_each_step = false;

    void validate() const;
};

struct ScenarioRow {
    std::string label;
    int n_in = 0;
    int n_out = 0;
    CriterionStats stats;
};

struct RawRecord {
    std::size_t row = 0;  // index into ExperimentReport::rows
    std::size_t replicate = 0;
    DatasetOutcome outcome;
};

struct ExperimentReport {
    std::string name;
    std::string kind;            // "simulated" or "financial"
    std::string metric = "mspe"; // "mspe" or "log_mspe"
    std::uint64_t seed = 0;
    std::string version{kVersion};
    std::string config_json;     // echo of the effective configuration
    std::vector<std::string> notes;
    std::vector<ScenarioRow> rows;
    std::vector<RawRecord> records;
};

/// Sampled or fixed DGP coefficient combinations with their labels.
struct DgpCombination {
    std::string label;
    ArmaCoefficients<double> coeffs;
};
std::vector<DgpCombination> draw_dgp_combinations(const DgpSpec& spec, std::uint64_t master_seed);

ExperimentReport run_simulated_experiment(const ExperimentConfig& cfg);

/// Reads value_column (and optionally date_column, ISO yyyy-mm-dd) from a
/// headered CSV.  With a date column the series is ordered by date and dates
/// must be distinct.
TimeSeries ingest_csv(const std::filesystem::path& path, const std::string& value_column,
                      const std::optional<std::string>& date_column = std::nullopt);

struct SegmentationSpec {
    int segment_length = 30;  // N
    int horizon = 10;         // T
    int segment_count = 8;
    bool centering = true;     // subtract the training-window mean
    bool log_returns = false;  // difference log levels first
    bool log_of_mean = false;  // report log(mean MSPE) instead of mean(log MSPE)

    void validate() const;
    Index required_length() const { return Index(segment_count) * segment_length + horizon; }
};

struct Asset {
    std::string name;
    TimeSeries series;
};

/// Consecutive, non-overlapping training windows from the start of the
/// series, each followed by its horizon.
std::vector<Dataset> segment_series(const Eigen::VectorXd& values, const SegmentationSpec& spec);

struct FinanceOptions {
    std::string name = "finance";
    std::uint64_t master_seed = 0;
    int jobs = 1;
};

ExperimentReport run_financial_experiment(const std::vector<Asset>& assets, const SegmentationSpec& spec,
                                          const CandidateGrid& grid, const FitConfig& fit_cfg,
                                          const MmlConfig& mml_cfg, const FinanceOptions& options = {});

enum class ReportFormat { csv, markdown, jsonl };
ReportFormat parse_report_format(const std::string& name);

/// Pooled statistics per (N, T) over every record with that pair.
struct PooledRow {
    int n_in = 0;
    int n_out = 0;
    CriterionStats stats;
};
std::vector<PooledRow> pooled_summary(const ExperimentReport& report);

/// Writes wins, metric, pooled-summary and raw-record tables (and per-N
/// figure data when requested) into out_dir.  Output bytes depend only on the
/// report.  Returns the written paths.
std::vector<std::filesystem::path> emit_report(const ExperimentReport& report, const std::filesystem::path& out_dir,
                                               ReportFormat format, bool figure_data);

std::string report_file_stem(const ExperimentReport& report);
std::string report_to_json(const ExperimentReport& report);
ExperimentReport report_from_json(std::string_view text);

// Configuration files (JSON).  Schema in docs/config.md.
ExperimentConfig parse_experiment_config(std::string_view json_text);
std::string experiment_config_to_json(const ExperimentConfig& cfg, bool include_jobs = false);
FitConfig parse_fit_config(std::string_view json_text);
MmlConfig parse_mml_config(std::string_view json_text);

struct AssetSource {
    std::string name;
    std::filesystem::path path;
    std::string value_column = "Close";
    std::optional<std::string> date_column;
};

struct FinanceConfig {
    std::string name = "finance";
    SegmentationSpec segmentation;
    std::vector<AssetSource> assets;
    CandidateGrid grid;
    FitConfig fit;
    MmlConfig mml;
    std::uint64_t master_seed = 0;
    int jobs = 1;
};

/// Asset paths are resolved against base_dir when relative.
FinanceConfig parse_finance_config(std::string_view json_text, const std::filesystem::path& base_dir = {});
std::string finance_config_to_json(const FinanceConfig& cfg);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace mmlarma

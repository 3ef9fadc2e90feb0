#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <numeric>

#include <fmt/format.h>

#include "mmlarma/harness.hpp"
#include "mmlarma/seeding.hpp"

namespace mmlarma {

namespace {

// RFC 4180-ish: commas inside double quotes, "" as an escaped quote.
std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                fields.back() += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.emplace_back();
        } else {
            fields.back() += ch;
        }
    }
    return fields;
}

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

std::size_t column_index(const std::vector<std::string>& header, const std::string& name,
                         const std::filesystem::path& path) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ArmaError(fmt::format("{}: column '{}' not found", path.string(), name));
    return static_cast<std::size_t>(it - header.begin());
}

bool is_iso_date(const std::string& s) {
    if (s.size() < 10) return false;
    for (std::size_t i = 0; i < 10; ++i) {
        if (i == 4 || i == 7) {
            if (s[i] != '-') return false;
        } else if (!std::isdigit(static_cast<unsigned char>(s[i]))) {
            return false;
        }
    }
    return s.size() == 10 || s[10] == 'T' || s[10] == ' ';
}

}  // namespace

TimeSeries ingest_csv(const std::filesystem::path& path, const std::string& value_column,
                      const std::optional<std::string>& date_column) {
    std::ifstream in(path);
    if (!in) throw ArmaError("cannot open '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line)) throw ArmaError(path.string() + ": empty file");
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> header = split_csv_line(line);
    for (auto& h : header) h = trim(h);
    const std::size_t value_idx = column_index(header, value_column, path);
    const std::optional<std::size_t> date_idx =
        date_column ? std::optional(column_index(header, *date_column, path)) : std::nullopt;

    struct Row {
        std::string date;
        double value;
    };
    std::vector<Row> rows;
    for (int line_no = 2; std::getline(in, line); ++line_no) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        const auto field = [&](std::size_t idx) { return idx < fields.size() ? trim(fields[idx]) : std::string(); };
        const std::string raw = field(value_idx);
        if (raw.empty())
            throw ArmaError(fmt::format("{}: line {}: missing value in column '{}'", path.string(), line_no, value_column));
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
        if (ec != std::errc() || ptr != raw.data() + raw.size() || !std::isfinite(v))
            throw ArmaError(fmt::format("{}: line {}: column '{}': cannot parse '{}' as a number", path.string(), line_no,
                                        value_column, raw));
        Row row{{}, v};
        if (date_idx) {
            row.date = field(*date_idx);
            if (!is_iso_date(row.date))
                throw ArmaError(fmt::format("{}: line {}: column '{}': '{}' is not a yyyy-mm-dd date", path.string(),
                                            line_no, *date_column, row.date));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ArmaError(path.string() + ": empty series");

    if (date_idx) {
        std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.date < b.date; });
        for (std::size_t i = 1; i < rows.size(); ++i)
            if (rows[i].date == rows[i - 1].date)
                throw ArmaError(fmt::format("{}: duplicate date {}", path.string(), rows[i].date));
    }

    TimeSeries series;
    series.values.resize(static_cast<Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        series.values(static_cast<Index>(i)) = rows[i].value;
        if (date_idx) series.labels.push_back(rows[i].date);
    }
    return series;
}

void SegmentationSpec::validate() const {
    if (segment_length < 1 || horizon < 1 || segment_count < 1)
        throw ArmaError("segment_length, horizon and segment_count must be positive");
}

std::vector<Dataset> segment_series(const Eigen::VectorXd& values, const SegmentationSpec& spec) {
    spec.validate();
    if (values.size() < spec.required_length()) throw ArmaError("series too short for segmentation");
    std::vector<Dataset> out;
    const Index n = spec.segment_length;
    const Index t = spec.horizon;
    for (Index s = 0; s < spec.segment_count; ++s) {
        Dataset d{values.segment(s * n, n), values.segment(s * n + n, t)};
        if (spec.centering) {
            const double mean = d.train.mean();
            d.train.array() -= mean;
            d.test.array() -= mean;
        }
        out.push_back(std::move(d));
    }
    return out;
}

ExperimentReport run_financial_experiment(const std::vector<Asset>& assets, const SegmentationSpec& spec,
                                          const CandidateGrid& grid, const FitConfig& fit_cfg,
                                          const MmlConfig& mml_cfg, const FinanceOptions& options) {
    spec.validate();
    ExperimentReport report;
    report.name = options.name;
    report.kind = "financial";
    report.metric = spec.log_of_mean ? "log_mean_mspe" : "log_mspe";
    report.seed = options.master_seed;

    std::vector<Dataset> datasets;
    for (std::size_t a = 0; a < assets.size(); ++a) {
        const auto& asset = assets[a];
        Eigen::VectorXd x = asset.series.values;
        if (spec.log_returns) {
            if ((x.array() <= 0.0).any()) {
                std::clog << "warning: skipping " << asset.name << ": log returns need positive levels\n";
                report.notes.push_back("skipped " + asset.name + ": nonpositive levels");
                continue;
            }
            if (x.size() < 2) {
                report.notes.push_back("skipped " + asset.name + ": series too short");
                continue;
            }
            x = (x.tail(x.size() - 1).array() / x.head(x.size() - 1).array()).log();
        }
        if (x.size() < spec.required_length()) {
            std::clog << "warning: skipping " << asset.name << ": series too short\n";
            report.notes.push_back("skipped " + asset.name + ": series too short");
            continue;
        }
        if ((x.array() == x(0)).all()) {
            std::clog << "warning: skipping " << asset.name << ": degenerate series\n";
            report.notes.push_back("skipped " + asset.name + ": degenerate series");
            continue;
        }
        const std::size_t row = report.rows.size();
        report.rows.push_back({asset.name, spec.segment_length, spec.horizon, {}});
        const auto segments = segment_series(x, spec);
        for (std::size_t s = 0; s < segments.size(); ++s) {
            datasets.push_back(segments[s]);
            report.records.push_back({row, s, {}});
        }
    }

    if (!datasets.empty()) {
        ComparisonOptions cmp{derive_seed(options.master_seed, {3}), options.jobs, false};
        auto result = compare_criteria(datasets, grid, fit_cfg, mml_cfg, cmp);
        for (std::size_t i = 0; i < report.records.size(); ++i)
            report.records[i].outcome = std::move(result.outcomes[i]);
    }

    for (std::size_t row = 0; row < report.rows.size(); ++row) {
        std::vector<DatasetOutcome> outcomes;
        for (const auto& rec : report.records)
            if (rec.row == row) outcomes.push_back(rec.outcome);
        auto stats = summarize(outcomes, true);
        if (spec.log_of_mean) {
            const auto plain = summarize(outcomes, false);
            for (std::size_t k = 0; k < kCriterionCount; ++k) stats.mean[k] = std::log(plain.mean[k]);
        }
        report.rows[row].stats = stats;
    }
    return report;
}

}  // namespace mmlarma

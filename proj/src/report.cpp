#include <fstream>
#include <map>

#include <fmt/format.h>

#include "json.hpp"
#include "mmlarma/harness.hpp"

namespace mmlarma {

using nlohmann::json;

namespace {

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

std::string render(const Table& table, ReportFormat format) {
    std::string out;
    switch (format) {
        case ReportFormat::csv: {
            auto line = [&](const std::vector<std::string>& cells) {
                for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + csv_field(cells[i]);
                out += '\n';
            };
            line(table.columns);
            for (const auto& r : table.rows) line(r);
            break;
        }
        case ReportFormat::markdown: {
            auto line = [&](const std::vector<std::string>& cells) {
                out += "|";
                for (const auto& c : cells) out += " " + c + " |";
                out += '\n';
            };
            line(table.columns);
            out += "|";
            for (std::size_t i = 0; i < table.columns.size(); ++i) out += " --- |";
            out += '\n';
            for (const auto& r : table.rows) line(r);
            break;
        }
        case ReportFormat::jsonl: {
            // A header record keeps empty tables self-describing.
            out += json{{"columns", table.columns}}.dump() + '\n';
            for (const auto& r : table.rows) {
                json obj = json::object();
                for (std::size_t i = 0; i < r.size(); ++i) obj[table.columns[i]] = r[i];
                out += obj.dump() + '\n';
            }
            break;
        }
    }
    return out;
}

std::string extension(ReportFormat format) {
    switch (format) {
        case ReportFormat::csv: return "csv";
        case ReportFormat::markdown: return "md";
        case ReportFormat::jsonl: return "jsonl";
    }
    return "txt";
}

std::string fixed6(double v) { return fmt::format("{:.6f}", v); }
std::string exact(double v) { return fmt::format("{:.17g}", v); }

std::vector<std::string> meta_columns() { return {"scenario", "N", "T", "datasets", "failures"}; }

std::vector<std::string> meta_cells(const std::string& label, int n, int t, const CriterionStats& s) {
    return {label, std::to_string(n), std::to_string(t), std::to_string(s.datasets), std::to_string(s.failures)};
}

Table wins_table(const ExperimentReport& report) {
    Table t{meta_columns(), {}};
    for (Criterion c : kAllCriteria) t.columns.emplace_back(criterion_name(c));
    for (const auto& row : report.rows) {
        auto cells = meta_cells(row.label, row.n_in, row.n_out, row.stats);
        for (std::size_t k = 0; k < kCriterionCount; ++k) cells.push_back(std::to_string(row.stats.wins[k]));
        t.rows.push_back(std::move(cells));
    }
    return t;
}

Table metric_table(const std::vector<std::string>& labels, const std::vector<std::pair<int, int>>& sizes,
                   const std::vector<CriterionStats>& stats, ReportFormat format) {
    Table t{meta_columns(), {}};
    const bool combined = format == ReportFormat::markdown;
    for (Criterion c : kAllCriteria) {
        if (combined) {
            t.columns.emplace_back(criterion_name(c));
        } else {
            t.columns.push_back(std::string(criterion_name(c)) + "_mean");
            t.columns.push_back(std::string(criterion_name(c)) + "_sd");
        }
    }
    for (std::size_t i = 0; i < stats.size(); ++i) {
        auto cells = meta_cells(labels[i], sizes[i].first, sizes[i].second, stats[i]);
        for (std::size_t k = 0; k < kCriterionCount; ++k) {
            if (combined) {
                cells.push_back(fmt::format("{} ({})", fixed6(stats[i].mean[k]), fixed6(stats[i].sd[k])));
            } else {
                cells.push_back(fixed6(stats[i].mean[k]));
                cells.push_back(fixed6(stats[i].sd[k]));
            }
        }
        t.rows.push_back(std::move(cells));
    }
    return t;
}

Table records_table(const ExperimentReport& report) {
    Table t{{"row", "scenario", "N", "T", "replicate", "ok", "failure"}, {}};
    for (Criterion c : kAllCriteria) {
        const std::string name(criterion_name(c));
        t.columns.push_back(name + "_order");
        t.columns.push_back(name + "_mspe");
        t.columns.push_back(name + "_win");
    }
    for (const auto& rec : report.records) {
        const auto& row = report.rows.at(rec.row);
        const auto& o = rec.outcome;
        std::vector<std::string> cells{std::to_string(rec.row), row.label, std::to_string(row.n_in),
                                       std::to_string(row.n_out), std::to_string(rec.replicate),
                                       o.ok ? "1" : "0", o.failure};
        for (std::size_t k = 0; k < kCriterionCount; ++k) {
            cells.push_back(o.ok ? to_string(o.chosen[k]) : "");
            cells.push_back(o.ok ? exact(o.mspe[k]) : "");
            cells.push_back(o.ok ? (o.winner[k] ? "1" : "0") : "");
        }
        t.rows.push_back(std::move(cells));
    }
    return t;
}

bool uses_log_metric(const ExperimentReport& report) { return report.metric.rfind("log", 0) == 0; }

std::string sanitize(const std::string& s) {
    std::string out;
    for (char c : s) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
    return out.empty() ? "report" : out;
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ArmaError("cannot write '" + path.string() + "'");
    out << contents;
    if (!out) throw ArmaError("cannot write '" + path.string() + "'");
}

json stats_to_json(const CriterionStats& s) {
    return {{"wins", s.wins}, {"mean", s.mean}, {"sd", s.sd}, {"datasets", s.datasets}, {"failures", s.failures}};
}

CriterionStats stats_from_json(const json& j) {
    CriterionStats s;
    s.wins = j.at("wins").get<PerCriterion<int>>();
    s.mean = j.at("mean").get<PerCriterion<double>>();
    s.sd = j.at("sd").get<PerCriterion<double>>();
    s.datasets = j.at("datasets").get<int>();
    s.failures = j.at("failures").get<int>();
    return s;
}

}  // namespace

ReportFormat parse_report_format(const std::string& name) {
    if (name == "csv") return ReportFormat::csv;
    if (name == "markdown" || name == "md") return ReportFormat::markdown;
    if (name == "jsonl" || name == "json-lines") return ReportFormat::jsonl;
    throw ArmaError("unknown report format '" + name + "'");
}

std::vector<PooledRow> pooled_summary(const ExperimentReport& report) {
    std::vector<PooledRow> out;
    std::map<std::pair<int, int>, std::vector<DatasetOutcome>> groups;
    for (const auto& row : report.rows) {
        const std::pair key{row.n_in, row.n_out};
        if (!groups.count(key)) {
            groups[key];
            out.push_back({row.n_in, row.n_out, {}});
        }
    }
    for (const auto& rec : report.records) {
        const auto& row = report.rows.at(rec.row);
        groups[{row.n_in, row.n_out}].push_back(rec.outcome);
    }
    for (auto& p : out) p.stats = summarize(groups[{p.n_in, p.n_out}], uses_log_metric(report));
    return out;
}

std::string report_file_stem(const ExperimentReport& report) {
    return fmt::format("{}_{}_seed{}", sanitize(report.name), sanitize(report.kind), report.seed);
}

std::vector<std::filesystem::path> emit_report(const ExperimentReport& report, const std::filesystem::path& out_dir,
                                               ReportFormat format, bool figure_data) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw ArmaError("cannot create '" + out_dir.string() + "': " + ec.message());

    const std::string stem = report_file_stem(report);
    const std::string ext = extension(format);
    std::vector<std::filesystem::path> written;
    auto emit = [&](const std::string& suffix, const Table& table) {
        const auto path = out_dir / fmt::format("{}_{}.{}", stem, suffix, ext);
        write_file(path, render(table, format));
        written.push_back(path);
    };

    emit("wins", wins_table(report));

    std::vector<std::string> labels;
    std::vector<std::pair<int, int>> sizes;
    std::vector<CriterionStats> stats;
    for (const auto& row : report.rows) {
        labels.push_back(row.label);
        sizes.emplace_back(row.n_in, row.n_out);
        stats.push_back(row.stats);
    }
    emit(report.metric, metric_table(labels, sizes, stats, format));

    const auto pooled = pooled_summary(report);
    labels.clear();
    sizes.clear();
    stats.clear();
    for (const auto& p : pooled) {
        labels.push_back("pooled");
        sizes.emplace_back(p.n_in, p.n_out);
        stats.push_back(p.stats);
    }
    emit("summary", metric_table(labels, sizes, stats, format));
    emit("records", records_table(report));

    if (figure_data) {
        std::map<int, Table> figures;
        std::vector<int> order;
        for (const auto& p : pooled) {
            if (!figures.count(p.n_in)) {
                figures[p.n_in] = Table{{"T", "criterion", "mean_" + report.metric}, {}};
                order.push_back(p.n_in);
            }
            for (Criterion c : kAllCriteria)
                figures[p.n_in].rows.push_back(
                    {std::to_string(p.n_out), std::string(criterion_name(c)), fixed6(p.stats.mean[index_of(c)])});
        }
        if (order.empty()) emit("figure", Table{{"T", "criterion", "mean_" + report.metric}, {}});
        for (int n : order) emit(fmt::format("figure_N{}", n), figures[n]);
    }
    return written;
}

std::string report_to_json(const ExperimentReport& report) {
    json rows = json::array();
    for (const auto& r : report.rows)
        rows.push_back({{"label", r.label}, {"n_in", r.n_in}, {"n_out", r.n_out}, {"stats", stats_to_json(r.stats)}});
    json records = json::array();
    for (const auto& rec : report.records) {
        const auto& o = rec.outcome;
        json chosen = json::array();
        for (const auto& ord : o.chosen) chosen.push_back({ord.p, ord.q});
        records.push_back({{"row", rec.row},
                           {"replicate", rec.replicate},
                           {"ok", o.ok},
                           {"failure", o.failure},
                           {"chosen", chosen},
                           {"mspe", o.mspe},
                           {"winner", o.winner}});
    }
    json config = report.config_json.empty() ? json(nullptr) : json::parse(report.config_json);
    json j{{"name", report.name},       {"kind", report.kind},   {"metric", report.metric},
           {"seed", report.seed},       {"version", report.version}, {"config", config},
           {"notes", report.notes},     {"rows", rows},          {"records", records}};
    return j.dump(1) + '\n';
}

ExperimentReport report_from_json(std::string_view text) {
    try {
        const json j = json::parse(text);
        ExperimentReport r;
        r.name = j.at("name").get<std::string>();
        r.kind = j.at("kind").get<std::string>();
        r.metric = j.at("metric").get<std::string>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.version = j.at("version").get<std::string>();
        if (!j.at("config").is_null()) r.config_json = j.at("config").dump();
        r.notes = j.at("notes").get<std::vector<std::string>>();
        for (const auto& row : j.at("rows"))
            r.rows.push_back({row.at("label").get<std::string>(), row.at("n_in").get<int>(), row.at("n_out").get<int>(),
                              stats_from_json(row.at("stats"))});
        for (const auto& rec : j.at("records")) {
            RawRecord raw;
            raw.row = rec.at("row").get<std::size_t>();
            raw.replicate = rec.at("replicate").get<std::size_t>();
            raw.outcome.ok = rec.at("ok").get<bool>();
            raw.outcome.failure = rec.at("failure").get<std::string>();
            const auto& chosen = rec.at("chosen");
            for (std::size_t k = 0; k < kCriterionCount; ++k)
                raw.outcome.chosen[k] = {chosen.at(k).at(0).get<int>(), chosen.at(k).at(1).get<int>()};
            raw.outcome.mspe = rec.at("mspe").get<PerCriterion<double>>();
            raw.outcome.winner = rec.at("winner").get<PerCriterion<bool>>();
            if (raw.row >= r.rows.size()) throw ArmaError("report record refers to a missing row");
            r.records.push_back(std::move(raw));
        }
        return r;
    } catch (const json::exception& e) {
        throw ArmaError(std::string("malformed report: ") + e.what());
    }
}

}  // namespace mmlarma

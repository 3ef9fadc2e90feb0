// mmlarma command-line front end.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "mmlarma/harness.hpp"
#include "mmlarma/likelihood.hpp"

namespace fs = std::filesystem;
using namespace mmlarma;
using nlohmann::json;

namespace {

struct Common {
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string config;
    std::string out;
    int jobs = 1;
    bool jobs_set = false;
    std::string format = "csv";
};

void add_common(CLI::App* app, Common& c, bool with_jobs) {
    app->add_option("--seed", c.seed, "Master seed")->each([&c](const std::string&) { c.seed_set = true; });
    app->add_option("--config", c.config, "JSON configuration file");
    app->add_option("--out", c.out, "Output file or directory");
    app->add_option("--format", c.format, "Table format: csv, markdown, jsonl")
        ->check(CLI::IsMember({"csv", "markdown", "md", "jsonl", "json-lines"}));
    if (with_jobs)
        app->add_option("--jobs", c.jobs, "Worker threads (overrides the config)")
            ->check(CLI::PositiveNumber)
            ->each([&c](const std::string&) { c.jobs_set = true; });
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty()) out.push_back(std::stod(item));
    return out;
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Index>(v.size()));
}

json vector_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

// Optional "fit" / "mml" sections of a --config file for the single-series commands.
struct ModelSettings {
    FitConfig fit;
    MmlConfig mml;
    CandidateGrid grid;
};

ModelSettings load_settings(const Common& c) {
    ModelSettings s;
    if (!c.config.empty()) {
        const json j = json::parse(read_text_file(c.config));
        if (j.contains("fit")) s.fit = parse_fit_config(j.at("fit").dump());
        if (j.contains("grid")) {
            const auto g = j.at("grid");
            s.grid = CandidateGrid(g.at("p").at(0), g.at("p").at(1), g.at("q").at(0), g.at("q").at(1));
        }
        s.mml.model_grid_size = static_cast<int>(s.grid.size());
        if (j.contains("mml")) {
            json m = j.at("mml");
            if (!m.contains("model_grid_size")) m["model_grid_size"] = s.mml.model_grid_size;
            s.mml = parse_mml_config(m.dump());
        }
    }
    if (c.seed_set) s.fit.seed = c.seed;
    return s;
}

json fitted_json(const FittedModel& m) {
    return {{"p", m.order.p},           {"q", m.order.q},
            {"phi", vector_json(m.coeffs.phi)}, {"theta", vector_json(m.coeffs.theta)},
            {"sigma2", m.coeffs.sigma2}, {"loglik", m.loglik},
            {"css", m.css},             {"converged", m.converged},
            {"n_obs", m.n_obs},         {"objective", to_string(m.objective)}};
}

void write_output(const std::string& out, const std::string& text) {
    if (out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f) throw ArmaError("cannot write '" + out + "'");
    f << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MML87 and information-criterion order selection for ARMA(p,q) models"};
    app.require_subcommand(1);

    // simulate
    Common sim_c;
    std::string sim_phi, sim_theta;
    double sim_sigma2 = 1.0;
    Index sim_n = 100;
    long sim_burn = -1;
    auto* sim = app.add_subcommand("simulate", "Simulate a Gaussian ARMA series to CSV");
    add_common(sim, sim_c, false);
    sim->add_option("--phi", sim_phi, "AR coefficients, comma separated");
    sim->add_option("--theta", sim_theta, "MA coefficients, comma separated (y_t = ... + e_t - theta_1 e_{t-1} ...)");
    sim->add_option("--sigma2", sim_sigma2, "Innovation variance")->check(CLI::PositiveNumber);
    sim->add_option("--n", sim_n, "Number of observations")->check(CLI::PositiveNumber);
    sim->add_option("--burn-in", sim_burn, "Discarded presample length (default 10(p+q+1)+100)");

    // fit
    Common fit_c;
    std::string fit_input, fit_column = "value", fit_objective;
    int fit_p = 1, fit_q = 0;
    auto* fitcmd = app.add_subcommand("fit", "Fit one ARMA(p,q) model to a CSV column");
    add_common(fitcmd, fit_c, false);
    fitcmd->add_option("--input", fit_input, "Input CSV")->required();
    fitcmd->add_option("--column", fit_column, "Value column");
    fitcmd->add_option("-p", fit_p, "AR order")->check(CLI::NonNegativeNumber);
    fitcmd->add_option("-q", fit_q, "MA order")->check(CLI::NonNegativeNumber);
    fitcmd->add_option("--objective", fit_objective, "css, exact or css_then_exact");

    // select
    Common sel_c;
    std::string sel_input, sel_column = "value";
    bool sel_center = false;
    auto* selcmd = app.add_subcommand("select", "Score every candidate order under all five criteria");
    add_common(selcmd, sel_c, false);
    selcmd->add_option("--input", sel_input, "Input CSV")->required();
    selcmd->add_option("--column", sel_column, "Value column");
    selcmd->add_flag("--center", sel_center, "Subtract the sample mean first");

    // backtest
    Common bt_c;
    std::string bt_input, bt_column = "value";
    Index bt_train = 0;
    int bt_p = 1, bt_q = 0;
    bool bt_refit = false;
    auto* btcmd = app.add_subcommand("backtest", "Fit on a training prefix and roll one-step forecasts over the rest");
    add_common(btcmd, bt_c, false);
    btcmd->add_option("--input", bt_input, "Input CSV")->required();
    btcmd->add_option("--column", bt_column, "Value column");
    btcmd->add_option("--train", bt_train, "Training length N")->required()->check(CLI::PositiveNumber);
    btcmd->add_option("-p", bt_p, "AR order")->check(CLI::NonNegativeNumber);
    btcmd->add_option("-q", bt_q, "MA order")->check(CLI::NonNegativeNumber);
    btcmd->add_flag("--refit-each-step", bt_refit, "Re-estimate on the trailing window before each forecast");

    // experiment sim | finance
    auto* exp = app.add_subcommand("experiment", "Run a simulation or financial-data comparison");
    exp->require_subcommand(1);
    Common es_c;
    bool es_figures = false;
    auto* es = exp->add_subcommand("sim", "Simulated-data protocol");
    add_common(es, es_c, true);
    es->add_flag("--figure-data", es_figures, "Also write per-T mean-MSPE curves");
    Common ef_c;
    bool ef_figures = false, ef_log_returns = false, ef_log_of_mean = false;
    auto* ef = exp->add_subcommand("finance", "Segmented rolling-forecast protocol on CSV price files");
    add_common(ef, ef_c, true);
    ef->add_flag("--figure-data", ef_figures, "Also write figure data");
    ef->add_flag("--log-returns", ef_log_returns, "Difference log levels before segmenting");
    ef->add_flag("--log-of-mean", ef_log_of_mean, "Report log(mean MSPE) rather than mean(log MSPE)");

    // report
    Common rep_c;
    std::string rep_input;
    bool rep_figures = false;
    auto* rep = app.add_subcommand("report", "Re-emit tables from a saved *_report.json");
    add_common(rep, rep_c, false);
    rep->add_option("--input", rep_input, "Saved report JSON")->required();
    rep->add_flag("--figure-data", rep_figures, "Also write figure data");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) {
            ArmaCoefficients<double> c{to_vector(parse_list(sim_phi)), to_vector(parse_list(sim_theta)), sim_sigma2};
            const Index burn = sim_burn >= 0 ? sim_burn : default_burn_in(c.order());
            const Eigen::VectorXd y = simulate(c, sim_n, burn, sim_c.seed);
            std::string text = "t,value\n";
            for (Index t = 0; t < y.size(); ++t) text += fmt::format("{},{:.17g}\n", t + 1, y(t));
            write_output(sim_c.out, text);
        } else if (fitcmd->parsed()) {
            auto s = load_settings(fit_c);
            if (!fit_objective.empty()) s.fit.objective = parse_fit_objective(fit_objective);
            const TimeSeries series = ingest_csv(fit_input, fit_column);
            const FittedModel m = fit(series.values, {fit_p, fit_q}, s.fit);
            write_output(fit_c.out, fitted_json(m).dump(2) + "\n");
        } else if (selcmd->parsed()) {
            const auto s = load_settings(sel_c);
            TimeSeries series = ingest_csv(sel_input, sel_column);
            if (sel_center) series.values.array() -= series.values.mean();
            const SelectionResult r = select(series.values, s.grid, s.fit, s.mml);
            const auto format = parse_report_format(sel_c.format);
            json out;
            for (Criterion c : kAllCriteria) out["chosen"][std::string(criterion_name(c))] = to_string(r.order_for(c));
            std::string text;
            if (format == ReportFormat::jsonl) {
                text = out.dump() + "\n";
                for (const auto& cand : r.candidates) {
                    json row = fitted_json(cand.model);
                    for (Criterion c : kAllCriteria) row[std::string(criterion_name(c))] = cand.scores[index_of(c)];
                    text += row.dump() + "\n";
                }
            } else {
                const bool md = format == ReportFormat::markdown;
                std::string header = "order";
                for (Criterion c : kAllCriteria) header += (md ? " | " : ",") + std::string(criterion_name(c));
                text = md ? "| " + header + " |\n|" + std::string(" --- |") + " --- | --- | --- | --- | --- |\n"
                          : header + "\n";
                for (const auto& cand : r.candidates) {
                    std::string line = md ? to_string(cand.model.order) : "\"" + to_string(cand.model.order) + "\"";
                    for (double v : cand.scores) line += (md ? " | " : ",") + fmt::format("{:.6f}", v);
                    text += md ? "| " + line + " |\n" : line + "\n";
                }
                for (Criterion c : kAllCriteria)
                    text += fmt::format("{}selected {} = {}\n", md ? "\n" : "# ", criterion_name(c), to_string(r.order_for(c)));
            }
            for (const auto& u : r.unscorable)
                std::clog << "warning: " << to_string(u.order) << " unscorable: " << u.reason << "\n";
            write_output(sel_c.out, text);
        } else if (btcmd->parsed()) {
            const auto s = load_settings(bt_c);
            const TimeSeries series = ingest_csv(bt_input, bt_column);
            if (bt_train >= series.size()) throw ArmaError("--train must leave at least one test observation");
            const Eigen::VectorXd train = series.values.head(bt_train);
            const Eigen::VectorXd test = series.values.tail(series.size() - bt_train);
            const FittedModel m = fit(train, {bt_p, bt_q}, s.fit);
            const BacktestResult r = rolling_forecast(train, test, m, {bt_refit, s.fit});
            json out = fitted_json(m);
            out["mspe"] = r.mspe;
            out["forecasts"] = vector_json(r.forecasts);
            out["squared_errors"] = vector_json(r.squared_errors);
            write_output(bt_c.out, out.dump(2) + "\n");
        } else if (es->parsed()) {
            if (es_c.config.empty()) throw ArmaError("experiment sim needs --config");
            ExperimentConfig cfg = parse_experiment_config(read_text_file(es_c.config));
            if (es_c.seed_set) cfg.master_seed = es_c.seed;
            if (es_c.jobs_set) cfg.jobs = es_c.jobs;
            const ExperimentReport report = run_simulated_experiment(cfg);
            const fs::path out = es_c.out.empty() ? fs::path("out") : fs::path(es_c.out);
            auto files = emit_report(report, out, parse_report_format(es_c.format), es_figures);
            const auto json_path = out / (report_file_stem(report) + "_report.json");
            write_output(json_path.string(), report_to_json(report));
            files.push_back(json_path);
            for (const auto& f : files) std::cout << f.string() << "\n";
        } else if (ef->parsed()) {
            if (ef_c.config.empty()) throw ArmaError("experiment finance needs --config");
            FinanceConfig cfg = parse_finance_config(read_text_file(ef_c.config), fs::path(ef_c.config).parent_path());
            if (ef_c.seed_set) cfg.master_seed = ef_c.seed;
            if (ef_log_returns) cfg.segmentation.log_returns = true;
            if (ef_log_of_mean) cfg.segmentation.log_of_mean = true;
            if (ef_c.jobs_set) cfg.jobs = ef_c.jobs;
            std::vector<Asset> assets;
            for (const auto& src : cfg.assets) assets.push_back({src.name, ingest_csv(src.path, src.value_column, src.date_column)});
            ExperimentReport report = run_financial_experiment(assets, cfg.segmentation, cfg.grid, cfg.fit, cfg.mml,
                                                               {cfg.name, cfg.master_seed, cfg.jobs});
            report.config_json = finance_config_to_json(cfg);
            const fs::path out = ef_c.out.empty() ? fs::path("out") : fs::path(ef_c.out);
            auto files = emit_report(report, out, parse_report_format(ef_c.format), ef_figures);
            const auto json_path = out / (report_file_stem(report) + "_report.json");
            write_output(json_path.string(), report_to_json(report));
            files.push_back(json_path);
            for (const auto& f : files) std::cout << f.string() << "\n";
        } else if (rep->parsed()) {
            const ExperimentReport report = report_from_json(read_text_file(rep_input));
            const fs::path out = rep_c.out.empty() ? fs::path("out") : fs::path(rep_c.out);
            for (const auto& f : emit_report(report, out, parse_report_format(rep_c.format), rep_figures))
                std::cout << f.string() << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

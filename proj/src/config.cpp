#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "mmlarma/harness.hpp"

namespace mmlarma {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& j, std::string_view section, std::initializer_list<std::string_view> allowed) {
    if (!j.is_object()) throw ArmaError("config section '" + std::string(section) + "' must be an object");
    const std::set<std::string_view> keys(allowed);
    for (const auto& [key, value] : j.items())
        if (!keys.count(key)) throw ArmaError("unknown config key '" + key + "' in section '" + std::string(section) + "'");
}

json parse_json(std::string_view text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw ArmaError(std::string("config parse error: ") + e.what());
    }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ArmaError(std::string("config key '") + key + "' has the wrong type");
    }
}

std::vector<int> int_list(const json& j, const char* key, std::vector<int> fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (v.is_number_integer()) return {v.get<int>()};
    if (v.is_array()) return v.get<std::vector<int>>();
    throw ArmaError(std::string("config key '") + key + "' must be an integer or a list of integers");
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Index>(v.size()));
}

std::vector<double> from_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

FitConfig fit_from_json(const json& j) {
    reject_unknown_keys(j, "fit", {"max_iterations", "objective_tolerance", "restart_count", "pacf_bound", "objective", "seed"});
    FitConfig cfg;
    cfg.max_iterations = get_or(j, "max_iterations", cfg.max_iterations);
    cfg.objective_tolerance = get_or(j, "objective_tolerance", cfg.objective_tolerance);
    cfg.restart_count = get_or(j, "restart_count", cfg.restart_count);
    cfg.pacf_bound = get_or(j, "pacf_bound", cfg.pacf_bound);
    cfg.objective = parse_fit_objective(get_or<std::string>(j, "objective", to_string(cfg.objective)));
    cfg.seed = get_or<std::uint64_t>(j, "seed", cfg.seed);
    cfg.validate();
    return cfg;
}

json fit_to_json(const FitConfig& cfg) {
    return {{"max_iterations", cfg.max_iterations}, {"objective_tolerance", cfg.objective_tolerance},
            {"restart_count", cfg.restart_count},   {"pacf_bound", cfg.pacf_bound},
            {"objective", to_string(cfg.objective)}, {"seed", cfg.seed}};
}

MmlConfig mml_from_json(const json& j, int default_grid_size) {
    reject_unknown_keys(j, "mml", {"accuracy_quantum", "model_grid_size", "include_constant_terms"});
    MmlConfig cfg;
    cfg.accuracy_quantum = get_or(j, "accuracy_quantum", cfg.accuracy_quantum);
    cfg.model_grid_size = get_or(j, "model_grid_size", default_grid_size);
    cfg.include_constant_terms = get_or(j, "include_constant_terms", cfg.include_constant_terms);
    cfg.validate();
    return cfg;
}

json mml_to_json(const MmlConfig& cfg) {
    return {{"accuracy_quantum", cfg.accuracy_quantum},
            {"model_grid_size", cfg.model_grid_size},
            {"include_constant_terms", cfg.include_constant_terms}};
}

CandidateGrid grid_from_json(const json& j) {
    if (j.is_array()) {
        std::vector<ArmaOrder> orders;
        for (const auto& o : j) orders.push_back({o.at(0).get<int>(), o.at(1).get<int>()});
        return CandidateGrid::from_orders(std::move(orders));
    }
    reject_unknown_keys(j, "grid", {"p", "q"});
    const auto p = get_or<std::vector<int>>(j, "p", {1, 5});
    const auto q = get_or<std::vector<int>>(j, "q", {0, 5});
    if (p.size() != 2 || q.size() != 2) throw ArmaError("grid ranges must be [min, max] pairs");
    return CandidateGrid(p[0], p[1], q[0], q[1]);
}

json grid_to_json(const CandidateGrid& grid) {
    json orders = json::array();
    for (const auto& o : grid.orders()) orders.push_back({o.p, o.q});
    return orders;
}

json section(const json& j, const char* key) { return j.contains(key) ? j.at(key) : json::object(); }

}  // namespace

void ExperimentConfig::validate() const {
    if (replications < 1) throw ArmaError("replications must be at least 1");
    if (n_in.empty() || n_out.empty()) throw ArmaError("n_in and n_out must be nonempty");
    for (int n : n_in)
        if (n < grid.max_p() + grid.max_q() + 2) throw ArmaError("n_in too small for the candidate grid");
    for (int t : n_out)
        if (t < 1) throw ArmaError("n_out must be positive");
    if (jobs < 1) throw ArmaError("jobs must be positive");
    dgp.order.validate();
    if (!(dgp.sigma2 > 0.0)) throw ArmaError("dgp sigma2 must be positive");
    if (dgp.ar_draws < 1 || dgp.ma_draws < 1) throw ArmaError("dgp draw counts must be positive");
    if (dgp.fixed && (!is_stationary(dgp.fixed->phi) || !is_invertible(dgp.fixed->theta)))
        throw ArmaError("fixed DGP must be stationary and invertible");
    fit.validate();
    mml.validate();
}

ExperimentConfig parse_experiment_config(std::string_view json_text) {
    const json j = parse_json(json_text);
    reject_unknown_keys(j, "experiment", {"name", "dgp", "n_in", "n_out", "replications", "grid", "master_seed", "jobs",
                                          "fit", "mml", "refit_each_step"});
    ExperimentConfig cfg;
    cfg.name = get_or<std::string>(j, "name", cfg.name);
    cfg.n_in = int_list(j, "n_in", cfg.n_in);
    cfg.n_out = int_list(j, "n_out", cfg.n_out);
    cfg.replications = get_or(j, "replications", cfg.replications);
    cfg.master_seed = get_or<std::uint64_t>(j, "master_seed", cfg.master_seed);
    cfg.jobs = get_or(j, "jobs", cfg.jobs);
    cfg.refit_each_step = get_or(j, "refit_each_step", cfg.refit_each_step);
    if (j.contains("grid")) cfg.grid = grid_from_json(j.at("grid"));
    cfg.fit = fit_from_json(section(j, "fit"));
    cfg.mml = mml_from_json(section(j, "mml"), static_cast<int>(cfg.grid.size()));

    const json dgp = section(j, "dgp");
    reject_unknown_keys(dgp, "dgp", {"p", "q", "ar_draws", "ma_draws", "sigma2", "phi", "theta"});
    cfg.dgp.order = {get_or(dgp, "p", cfg.dgp.order.p), get_or(dgp, "q", cfg.dgp.order.q)};
    cfg.dgp.ar_draws = get_or(dgp, "ar_draws", cfg.dgp.ar_draws);
    cfg.dgp.ma_draws = get_or(dgp, "ma_draws", cfg.dgp.ma_draws);
    cfg.dgp.sigma2 = get_or(dgp, "sigma2", cfg.dgp.sigma2);
    if (dgp.contains("phi") || dgp.contains("theta")) {
        ArmaCoefficients<double> fixed{to_vector(get_or<std::vector<double>>(dgp, "phi", {})),
                                       to_vector(get_or<std::vector<double>>(dgp, "theta", {})), cfg.dgp.sigma2};
        cfg.dgp.order = fixed.order();
        cfg.dgp.fixed = std::move(fixed);
    }
    cfg.validate();
    return cfg;
}

std::string experiment_config_to_json(const ExperimentConfig& cfg, bool include_jobs) {
    json dgp{{"p", cfg.dgp.order.p},
             {"q", cfg.dgp.order.q},
             {"ar_draws", cfg.dgp.ar_draws},
             {"ma_draws", cfg.dgp.ma_draws},
             {"sigma2", cfg.dgp.sigma2}};
    if (cfg.dgp.fixed) {
        dgp["phi"] = from_vector(cfg.dgp.fixed->phi);
        dgp["theta"] = from_vector(cfg.dgp.fixed->theta);
    }
    json j{{"name", cfg.name},
           {"dgp", dgp},
           {"n_in", cfg.n_in},
           {"n_out", cfg.n_out},
           {"replications", cfg.replications},
           {"grid", grid_to_json(cfg.grid)},
           {"master_seed", cfg.master_seed},
           {"fit", fit_to_json(cfg.fit)},
           {"mml", mml_to_json(cfg.mml)},
           {"refit_each_step", cfg.refit_each_step}};
    if (include_jobs) j["jobs"] = cfg.jobs;
    return j.dump();
}

FitConfig parse_fit_config(std::string_view json_text) { return fit_from_json(parse_json(json_text)); }

MmlConfig parse_mml_config(std::string_view json_text) { return mml_from_json(parse_json(json_text), 30); }

FinanceConfig parse_finance_config(std::string_view json_text, const std::filesystem::path& base_dir) {
    const json j = parse_json(json_text);
    reject_unknown_keys(j, "finance", {"name", "segmentation", "assets", "grid", "fit", "mml", "master_seed", "jobs"});
    FinanceConfig cfg;
    cfg.name = get_or<std::string>(j, "name", cfg.name);
    cfg.master_seed = get_or<std::uint64_t>(j, "master_seed", cfg.master_seed);
    cfg.jobs = get_or(j, "jobs", cfg.jobs);
    if (j.contains("grid")) cfg.grid = grid_from_json(j.at("grid"));
    cfg.fit = fit_from_json(section(j, "fit"));
    cfg.mml = mml_from_json(section(j, "mml"), static_cast<int>(cfg.grid.size()));

    const json seg = section(j, "segmentation");
    reject_unknown_keys(seg, "segmentation",
                        {"segment_length", "horizon", "segment_count", "centering", "log_returns", "log_of_mean"});
    auto& s = cfg.segmentation;
    s.segment_length = get_or(seg, "segment_length", s.segment_length);
    s.horizon = get_or(seg, "horizon", s.horizon);
    s.segment_count = get_or(seg, "segment_count", s.segment_count);
    s.centering = get_or(seg, "centering", s.centering);
    s.log_returns = get_or(seg, "log_returns", s.log_returns);
    s.log_of_mean = get_or(seg, "log_of_mean", s.log_of_mean);
    s.validate();

    for (const auto& a : section(j, "assets")) {
        reject_unknown_keys(a, "assets", {"name", "path", "value_column", "date_column"});
        AssetSource src;
        src.path = get_or<std::string>(a, "path", "");
        if (src.path.empty()) throw ArmaError("asset entry without a path");
        if (src.path.is_relative() && !base_dir.empty()) src.path = base_dir / src.path;
        src.name = get_or<std::string>(a, "name", src.path.stem().string());
        src.value_column = get_or<std::string>(a, "value_column", src.value_column);
        if (a.contains("date_column")) src.date_column = a.at("date_column").get<std::string>();
        cfg.assets.push_back(std::move(src));
    }
    if (cfg.assets.empty()) throw ArmaError("finance config lists no assets");
    if (cfg.jobs < 1) throw ArmaError("jobs must be positive");
    return cfg;
}

std::string finance_config_to_json(const FinanceConfig& cfg) {
    const auto& s = cfg.segmentation;
    json assets = json::array();
    for (const auto& a : cfg.assets) {
        json entry{{"name", a.name}, {"path", a.path.filename().string()}, {"value_column", a.value_column}};
        if (a.date_column) entry["date_column"] = *a.date_column;
        assets.push_back(entry);
    }
    json j{{"name", cfg.name},
           {"segmentation",
            {{"segment_length", s.segment_length},
             {"horizon", s.horizon},
             {"segment_count", s.segment_count},
             {"centering", s.centering},
             {"log_returns", s.log_returns},
             {"log_of_mean", s.log_of_mean}}},
           {"assets", assets},
           {"grid", grid_to_json(cfg.grid)},
           {"fit", fit_to_json(cfg.fit)},
           {"mml", mml_to_json(cfg.mml)},
           {"master_seed", cfg.master_seed}};
    return j.dump();
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ArmaError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace mmlarma

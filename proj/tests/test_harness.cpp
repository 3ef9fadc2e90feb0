#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "mmlarma/harness.hpp"

using namespace mmlarma;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("mmlarma_test_" + name)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }

    fs::path write(const std::string& file, const std::string& text) const {
        std::ofstream(path / file, std::ios::binary) << text;
        return path / file;
    }
};

std::size_t line_count(const fs::path& p) {
    std::ifstream in(p);
    std::size_t n = 0;
    for (std::string line; std::getline(in, line);) ++n;
    return n;
}

DatasetOutcome fake_outcome(double base) {
    DatasetOutcome o;
    o.ok = true;
    for (std::size_t k = 0; k < kCriterionCount; ++k) {
        o.mspe[k] = base + 0.1 * static_cast<double>(k);
        o.chosen[k] = {1, static_cast<int>(k % 2)};
    }
    o.winner[0] = true;
    return o;
}

}  // namespace

TEST_CASE("CSV ingestion") {
    TempDir dir("csv");

    SUBCASE("two rows") {
        const auto f = dir.write("a.csv", "Date,Close\n2020-01-02,10.5\n2020-01-01,11\n");
        const auto plain = ingest_csv(f, "Close");
        REQUIRE(plain.size() == 2);
        CHECK(plain.values(0) == 10.5);
        CHECK(plain.labels.empty());
        const auto dated = ingest_csv(f, "Close", std::string("Date"));
        CHECK(dated.values(0) == 11.0);
        CHECK(dated.values(1) == 10.5);
        CHECK(dated.labels == std::vector<std::string>{"2020-01-01", "2020-01-02"});
    }
    SUBCASE("quoted fields, CRLF and a byte-order mark") {
        const auto f = dir.write("b.csv", "\xEF\xBB\xBF\"Name, full\",Close\r\n\"x, y\",1.5\r\n\"z\",2\r\n");
        const auto s = ingest_csv(f, "Close");
        REQUIRE(s.size() == 2);
        CHECK(s.values(1) == 2.0);
    }
    SUBCASE("errors name the row") {
        const auto blank = dir.write("c.csv", "Close\n1\n\n2\n,\n");
        CHECK_THROWS_WITH_AS(ingest_csv(blank, "Close"), doctest::Contains("line 5"), ArmaError);
        const auto bad = dir.write("d.csv", "Close\n1\nabc\n");
        CHECK_THROWS_WITH_AS(ingest_csv(bad, "Close"), doctest::Contains("line 3"), ArmaError);
        CHECK_THROWS_WITH_AS(ingest_csv(bad, "Open"), doctest::Contains("not found"), ArmaError);
        const auto dup = dir.write("e.csv", "Date,Close\n2020-01-01,1\n2020-01-01,2\n");
        CHECK_THROWS_WITH_AS(ingest_csv(dup, "Close", std::string("Date")), doctest::Contains("duplicate date"),
                             ArmaError);
        const auto baddate = dir.write("f.csv", "Date,Close\n01/02/2020,1\n");
        CHECK_THROWS_AS(ingest_csv(baddate, "Close", std::string("Date")), ArmaError);
        CHECK_THROWS_AS(ingest_csv(dir.path / "missing.csv", "Close"), ArmaError);
        CHECK_THROWS_AS(ingest_csv(dir.write("g.csv", "Close\n"), "Close"), ArmaError);
    }
}

TEST_CASE("segmentation") {
    Eigen::VectorXd x(25);
    for (Index i = 0; i < 25; ++i) x(i) = static_cast<double>(i);
    SegmentationSpec spec;
    spec.segment_length = 6;
    spec.horizon = 2;
    spec.segment_count = 3;
    spec.centering = false;
    const auto segs = segment_series(x, spec);
    REQUIRE(segs.size() == 3);
    CHECK(segs[0].train(0) == 0.0);
    CHECK(segs[1].train(0) == 6.0);
    CHECK(segs[2].train(5) == 17.0);
    CHECK(segs[2].test(0) == 18.0);
    CHECK(segs[2].test(1) == 19.0);

    spec.centering = true;
    const auto centered = segment_series(x, spec);
    CHECK(centered[1].train.mean() == doctest::Approx(0.0).scale(1.0));
    CHECK(centered[1].test(0) == doctest::Approx(12.0 - 8.5));

    spec.segment_count = 4;
    CHECK_THROWS_AS(segment_series(x, spec), ArmaError);
    spec.segment_length = 0;
    CHECK_THROWS_AS(spec.validate(), ArmaError);
}

TEST_CASE("financial experiment skips unusable assets") {
    SegmentationSpec spec;
    spec.segment_length = 30;
    spec.horizon = 5;
    spec.segment_count = 2;
    std::vector<Asset> assets;
    assets.push_back({"flat", {Eigen::VectorXd::Constant(80, 3.0), {}}});
    assets.push_back({"short", {simulate(ArmaCoefficients<double>{{}, {}, 1.0}, 20, 1), {}}});
    assets.push_back({"good", {simulate(ArmaCoefficients<double>{Eigen::VectorXd::Constant(1, 0.4), {}, 1.0}, 80, 2), {}}});
    FitConfig fit;
    fit.objective = FitObjective::css;
    fit.restart_count = 1;
    const auto report = run_financial_experiment(assets, spec, CandidateGrid(1, 2, 0, 1), fit, MmlConfig{0.01, 4, true});
    REQUIRE(report.rows.size() == 1);
    CHECK(report.rows[0].label == "good");
    CHECK(report.records.size() == 2);
    CHECK(report.notes.size() == 2);
    CHECK(report.metric == "log_mspe");
    CHECK(report.rows[0].stats.datasets + report.rows[0].stats.failures == 2);
}

TEST_CASE("report emission") {
    TempDir dir("report");

    SUBCASE("empty report gives header-only tables") {
        ExperimentReport empty;
        empty.name = "empty";
        empty.kind = "simulated";
        const auto files = emit_report(empty, dir.path, ReportFormat::csv, true);
        CHECK(files.size() == 5);
        for (const auto& f : files) CHECK(line_count(f) == 1);
    }
    SUBCASE("ten-row table and per-N figure data") {
        ExperimentReport r;
        r.name = "table";
        r.kind = "simulated";
        r.seed = 5;
        for (int i = 0; i < 10; ++i) {
            const int n = i < 5 ? 50 : 100;
            r.rows.push_back({"phi" + std::to_string(i / 2 + 1) + ",theta" + std::to_string(i % 2 + 1), n, 10, {}});
            std::vector<DatasetOutcome> outs;
            for (std::size_t rep = 0; rep < 3; ++rep) {
                r.records.push_back({static_cast<std::size_t>(i), rep, fake_outcome(1.0 + i + rep)});
                outs.push_back(r.records.back().outcome);
            }
            r.rows.back().stats = summarize(outs);
        }
        const auto md = emit_report(r, dir.path, ReportFormat::markdown, true);
        // wins, mspe, summary, records, figure_N50, figure_N100
        REQUIRE(md.size() == 6);
        CHECK(md[0].filename() == "table_simulated_seed5_wins.md");
        CHECK(line_count(md[1]) == 12);
        CHECK(line_count(md[2]) == 4);
        CHECK(line_count(md[3]) == 32);
        CHECK(line_count(md[4]) == 2 + kCriterionCount);

        const auto csv = emit_report(r, dir.path, ReportFormat::csv, false);
        CHECK(csv.size() == 4);
        CHECK(line_count(csv[1]) == 11);
        const auto jsonl = emit_report(r, dir.path, ReportFormat::jsonl, false);
        CHECK(line_count(jsonl[3]) == 31);

        // Identical reports give identical bytes.
        const std::string first = read_text_file(csv[3]);
        emit_report(r, dir.path, ReportFormat::csv, false);
        CHECK(read_text_file(csv[3]) == first);
    }
    SUBCASE("figure data for a horizon sweep") {
        ExperimentReport r;
        r.name = "sweep";
        r.kind = "simulated";
        for (int t : {10, 30, 50, 100}) {
            r.rows.push_back({"fixed", 100, t, {}});
            r.records.push_back({r.rows.size() - 1, 0, fake_outcome(t / 10.0)});
        }
        const auto files = emit_report(r, dir.path, ReportFormat::csv, true);
        REQUIRE(files.size() == 5);
        CHECK(files[4].filename() == "sweep_simulated_seed0_figure_N100.csv");
        CHECK(line_count(files[4]) == 1 + 4 * kCriterionCount);
        CHECK(read_text_file(files[4]).rfind("T,criterion,mean_mspe\n10,MML87,", 0) == 0);
    }
    SUBCASE("pooled summary groups by (N, T)") {
        ExperimentReport r;
        r.rows = {{"a", 50, 10, {}}, {"b", 50, 10, {}}, {"c", 80, 10, {}}};
        r.records = {{0, 0, fake_outcome(1.0)}, {1, 0, fake_outcome(3.0)}, {2, 0, fake_outcome(5.0)}};
        const auto pooled = pooled_summary(r);
        REQUIRE(pooled.size() == 2);
        CHECK(pooled[0].stats.datasets == 2);
        CHECK(pooled[0].stats.mean[0] == doctest::Approx(2.0));
        CHECK(pooled[1].n_in == 80);
    }
    CHECK(parse_report_format("md") == ReportFormat::markdown);
    CHECK_THROWS_AS(parse_report_format("xlsx"), ArmaError);
}

TEST_CASE("report JSON round trip") {
    ExperimentReport r;
    r.name = "rt";
    r.kind = "financial";
    r.metric = "log_mspe";
    r.seed = 99;
    r.notes = {"skipped x"};
    r.rows = {{"asset", 30, 10, {}}};
    DatasetOutcome bad;
    bad.failure = "boom";
    r.records = {{0, 0, fake_outcome(0.123456789012345)}, {0, 1, bad}};
    r.rows[0].stats = summarize(std::vector<DatasetOutcome>{r.records[0].outcome, bad});
    const auto back = report_from_json(report_to_json(r));
    CHECK(report_to_json(back) == report_to_json(r));
    CHECK(back.records[0].outcome.mspe == r.records[0].outcome.mspe);
    CHECK(back.records[1].outcome.failure == "boom");
    CHECK_THROWS_AS(report_from_json("{}"), ArmaError);
}

TEST_CASE("experiment configuration") {
    const auto cfg = parse_experiment_config(R"({"name":"t","n_in":[50,100],"n_out":10,"replications":3,
        "grid":{"p":[1,2],"q":[0,1]},"master_seed":7,"fit":{"objective":"css","restart_count":2},
        "mml":{"accuracy_quantum":0.001}})");
    CHECK(cfg.n_in == std::vector<int>{50, 100});
    CHECK(cfg.n_out == std::vector<int>{10});
    CHECK(cfg.grid.size() == 4);
    CHECK(cfg.fit.objective == FitObjective::css);
    CHECK(cfg.fit.restart_count == 2);
    CHECK(cfg.mml.accuracy_quantum == 0.001);
    CHECK(cfg.mml.model_grid_size == 4);
    const auto again = parse_experiment_config(experiment_config_to_json(cfg));
    CHECK(experiment_config_to_json(again) == experiment_config_to_json(cfg));

    CHECK_THROWS_WITH_AS(parse_experiment_config(R"({"replicatons":3})"), doctest::Contains("replicatons"), ArmaError);
    CHECK_THROWS_AS(parse_experiment_config(R"({"replications":0})"), ArmaError);
    CHECK_THROWS_AS(parse_experiment_config(R"({"n_in":[3]})"), ArmaError);
    CHECK_THROWS_AS(parse_experiment_config("{not json"), ArmaError);
    CHECK_THROWS_AS(parse_experiment_config(R"({"dgp":{"phi":[1.5]}})"), ArmaError);
}

TEST_CASE("DGP draws") {
    DgpSpec spec;
    spec.order = {2, 1};
    spec.ar_draws = 3;
    spec.ma_draws = 2;
    const auto a = draw_dgp_combinations(spec, 42);
    const auto b = draw_dgp_combinations(spec, 42);
    REQUIRE(a.size() == 6);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].coeffs.phi == b[i].coeffs.phi);
        CHECK(is_stationary(a[i].coeffs.phi));
        CHECK(is_invertible(a[i].coeffs.theta));
        CHECK((a[i].coeffs.phi.array().abs() < 1.0).all());
    }
    CHECK(a[0].label == "phi1,theta1");
    CHECK(a[1].coeffs.phi == a[0].coeffs.phi);
    CHECK(a[2].coeffs.theta == a[0].coeffs.theta);
    CHECK(draw_dgp_combinations(spec, 43)[0].coeffs.phi != a[0].coeffs.phi);
}

TEST_CASE("small simulated experiment") {
    ExperimentConfig cfg;
    cfg.dgp.ar_draws = 1;
    cfg.dgp.ma_draws = 1;
    cfg.n_in = {40};
    cfg.n_out = {5};
    cfg.replications = 1;
    cfg.grid = CandidateGrid(1, 2, 0, 1);
    cfg.fit.objective = FitObjective::css;
    cfg.fit.restart_count = 1;
    cfg.mml.model_grid_size = 4;
    cfg.master_seed = 3;
    const auto one = run_simulated_experiment(cfg);
    REQUIRE(one.rows.size() == 1);
    REQUIRE(one.records.size() == 1);
    CHECK(one.rows[0].stats.sd[0] == 0.0);
    cfg.jobs = 3;
    cfg.replications = 4;
    const auto threaded = run_simulated_experiment(cfg);
    cfg.jobs = 1;
    const auto serial = run_simulated_experiment(cfg);
    CHECK(report_to_json(threaded) == report_to_json(serial));
}

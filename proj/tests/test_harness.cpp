#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mimomc/harness.hpp"
#include "mimomc/iq_io.hpp"
#include "oracles.hpp"

using namespace mimomc;
namespace fs = std::filesystem;

namespace {

struct ScratchDir {
    fs::path path;
    ScratchDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("mimomc_harness_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
        fs::create_directories(path);
    }
    ~ScratchDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

SweepConfig small_config() {
    SweepConfig cfg;
    cfg.snr_db_grid = {0.0, 5.0};
    cfg.trials_per_point = 5;
    cfg.n_symbols = 128;
    cfg.m_t = 2;
    cfg.m_r = 4;
    cfg.algorithms = {Algorithm::Proposed, Algorithm::AlrtUb};
    cfg.master_seed = 99;
    cfg.threads = 1;
    return cfg;
}

}  // namespace

TEST_CASE("snr grid construction") {
    const auto grid = snr_grid(-10.0, 15.0, 2.5);
    REQUIRE(grid.size() == 11);
    CHECK(grid.front() == doctest::Approx(-10.0).epsilon(1e-15));
    CHECK(grid.back() == doctest::Approx(15.0).epsilon(1e-12));
    for (std::size_t i = 1; i < grid.size(); ++i)
        CHECK(grid[i] - grid[i - 1] == doctest::Approx(2.5).epsilon(1e-12));

    const auto single = snr_grid(3.0, 3.0, 1.0);
    REQUIRE(single.size() == 1);
    CHECK(single[0] == 3.0);

    // endpoint reached through accumulated fp steps still lands on the grid
    const auto fine = snr_grid(-6.0, 8.0, 1.0);
    CHECK(fine.size() == 15);
    const auto uneven = snr_grid(0.0, 1.0, 0.3);
    CHECK(uneven.size() == 4);  // 0, 0.3, 0.6, 0.9

    CHECK_THROWS_AS(snr_grid(0.0, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(snr_grid(0.0, 1.0, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(snr_grid(2.0, 1.0, 0.5), std::invalid_argument);
}

TEST_CASE("run_trial is deterministic and pairs algorithms on the same frame") {
    const auto cfg = small_config();
    const auto a = run_trial(cfg, 1, 2, 3, Algorithm::Proposed);
    const auto b = run_trial(cfg, 1, 2, 3, Algorithm::Proposed);
    CHECK(a.seed == b.seed);
    CHECK(a.snr_db == b.snr_db);
    CHECK(a.scheme_true == b.scheme_true);
    CHECK(a.scheme_decided == b.scheme_decided);
    CHECK(a.failed == b.failed);
    CHECK(a.snr_db == 5.0);
    CHECK(a.scheme_true == Scheme::Psk8);
    CHECK(a.n == cfg.n_symbols);
    CHECK(a.m_t == cfg.m_t);
    CHECK(a.m_r == cfg.m_r);

    // the per-trial seed ignores the algorithm, so baselines see the same frame
    const auto c = run_trial(cfg, 1, 2, 3, Algorithm::AlrtUb);
    CHECK(c.seed == a.seed);
    CHECK(c.algorithm == Algorithm::AlrtUb);

    const auto d = run_trial(cfg, 1, 2, 4, Algorithm::Proposed);
    CHECK(d.seed != a.seed);
    CHECK_THROWS_AS(run_trial(cfg, 2, 0, 0, Algorithm::Proposed), std::invalid_argument);
    CHECK_THROWS_AS(run_trial(cfg, 0, 4, 0, Algorithm::Proposed), std::invalid_argument);
    CHECK_THROWS_AS(run_trial(cfg, 0, 0, -1, Algorithm::Proposed), std::invalid_argument);
}

TEST_CASE("sweep aggregates are consistent and thread-count invariant") {
    auto cfg = small_config();
    const auto serial = run_sweep(cfg);
    cfg.threads = 3;
    const auto parallel = run_sweep(cfg);

    const std::size_t n_sch = cfg.candidates.size();
    REQUIRE(serial.cells.size() == 4);  // 2 snr x 2 algorithms
    REQUIRE(serial.records.size() == 2 * n_sch * 5 * 2);

    // records are laid out (snr, scheme, trial, algorithm)
    CHECK(serial.records[0].snr_db == 0.0);
    CHECK(serial.records[0].algorithm == Algorithm::Proposed);
    CHECK(serial.records[1].algorithm == Algorithm::AlrtUb);
    CHECK(serial.records[1].seed == serial.records[0].seed);
    const std::size_t per_snr = n_sch * 5 * 2;
    CHECK(serial.records[per_snr].snr_db == 5.0);

    REQUIRE(parallel.cells.size() == serial.cells.size());
    for (std::size_t i = 0; i < serial.cells.size(); ++i) {
        const auto& s = serial.cells[i];
        const auto& p = parallel.cells[i];
        CHECK(s.snr_db == p.snr_db);
        CHECK(s.algorithm == p.algorithm);
        CHECK(s.p_cc == p.p_cc);
        CHECK(s.confusion == p.confusion);
        CHECK(s.per_scheme_accuracy == p.per_scheme_accuracy);

        // each confusion row accounts for every trial
        double diag_mean = 0.0;
        for (std::size_t ci = 0; ci < n_sch; ++ci) {
            int row_sum = 0;
            for (int v : s.confusion[ci]) row_sum += v;
            CHECK(row_sum == cfg.trials_per_point);
            CHECK(s.per_scheme_accuracy[ci] ==
                  static_cast<double>(s.confusion[ci][ci]) / cfg.trials_per_point);
            diag_mean += s.per_scheme_accuracy[ci];
        }
        CHECK(s.p_cc == doctest::Approx(diag_mean / static_cast<double>(n_sch)).epsilon(1e-15));
    }

    for (std::size_t r = 0; r < serial.records.size(); ++r) {
        CHECK(serial.records[r].seed == parallel.records[r].seed);
        CHECK(serial.records[r].scheme_decided == parallel.records[r].scheme_decided);
        CHECK(serial.records[r].failed == parallel.records[r].failed);
    }

    // emitted accuracy tables are byte-identical across thread counts
    ScratchDir dir;
    const auto p1 = dir.path / "serial.csv";
    const auto p2 = dir.path / "parallel.csv";
    emit_results(serial, p1, OutputFormat::Csv);
    emit_results(parallel, p2, OutputFormat::Csv);
    CHECK(read_text_file(p1) == read_text_file(p2));
}

TEST_CASE("csv emission round trips through the reader") {
    ScratchDir dir;
    const auto cfg = small_config();
    const auto result = run_sweep(cfg);
    const auto csv_path = dir.path / "out.csv";
    emit_results(result, csv_path, OutputFormat::Csv);

    const std::string text = read_text_file(csv_path);
    CHECK(text.rfind("snr_db,algorithm,scheme_true,trials,correct,accuracy\n", 0) == 0);

    const auto rows = read_accuracy_csv(csv_path);
    const std::size_t n_sch = cfg.candidates.size();
    REQUIRE(rows.size() == result.cells.size() * n_sch);
    std::size_t r = 0;
    for (const auto& cell : result.cells) {
        for (std::size_t ci = 0; ci < n_sch; ++ci, ++r) {
            CHECK(rows[r].snr_db == cell.snr_db);
            CHECK(rows[r].algorithm == algorithm_name(cell.algorithm));
            CHECK(rows[r].scheme_true == scheme_name(cell.schemes[ci]));
            CHECK(rows[r].trials == cfg.trials_per_point);
            CHECK(rows[r].correct == cell.confusion[ci][ci]);
            // shortest-round-trip formatting: the parsed double is bit-equal
            CHECK(rows[r].accuracy == cell.per_scheme_accuracy[ci]);
        }
    }

    // summary json and per-cell confusion files appear next to the table
    CHECK(fs::exists(dir.path / "out_summary.json"));
    for (const char* name : {"out_confusion_proposed_snr0.csv", "out_confusion_alrt_ub_snr0.csv",
                             "out_confusion_proposed_snr5.csv", "out_confusion_alrt_ub_snr5.csv"}) {
        CAPTURE(name);
        REQUIRE(fs::exists(dir.path / name));
        const std::string conf = read_text_file(dir.path / name);
        CHECK(conf.rfind("scheme_true,scheme_decided,count\n", 0) == 0);
        // 4 true schemes x (4 decisions + failed) data rows
        std::size_t lines = 0;
        for (char ch : conf) lines += (ch == '\n') ? 1 : 0;
        CHECK(lines == 1 + n_sch * (n_sch + 1));
    }

    // confusion counts in one cell file sum to schemes x trials
    const auto conf = read_text_file(dir.path / "out_confusion_proposed_snr0.csv");
    std::size_t pos = conf.find('\n') + 1;
    long total = 0;
    while (pos < conf.size()) {
        const std::size_t eol = conf.find('\n', pos);
        const std::string line = conf.substr(pos, eol - pos);
        total += std::stol(line.substr(line.rfind(',') + 1));
        pos = eol + 1;
    }
    CHECK(total == static_cast<long>(n_sch) * cfg.trials_per_point);
}

TEST_CASE("json emission carries the config echo and per-cell results") {
    ScratchDir dir;
    const auto cfg = small_config();
    const auto result = run_sweep(cfg);
    const auto json_path = dir.path / "out.json";
    emit_results(result, json_path, OutputFormat::Json);

    const auto doc = nlohmann::json::parse(read_text_file(json_path));
    REQUIRE(doc.contains("config"));
    REQUIRE(doc.contains("results"));
    CHECK(doc["config"]["m_t"] == 2);
    CHECK(doc["config"]["m_r"] == 4);
    CHECK(doc["config"]["n_symbols"] == 128);
    CHECK(doc["config"]["master_seed"] == 99);
    CHECK(doc["config"]["snr_db_grid"].size() == 2);
    CHECK(doc["config"]["candidates"].size() == 4);
    REQUIRE(doc["results"].size() == result.cells.size());
    for (std::size_t i = 0; i < result.cells.size(); ++i) {
        const auto& jc = doc["results"][i];
        CHECK(jc["snr_db"].get<double>() == result.cells[i].snr_db);
        CHECK(jc["algorithm"].get<std::string>() == algorithm_name(result.cells[i].algorithm));
        // doubles survive the json round trip exactly
        CHECK(jc["p_cc"].get<double>() == result.cells[i].p_cc);
        CHECK(jc["confusion"].size() == cfg.candidates.size());
    }
}

TEST_CASE("sweep config validation") {
    const auto base = small_config();
    auto cfg = base;
    cfg.snr_db_grid.clear();
    CHECK_THROWS_AS(run_sweep(cfg), std::invalid_argument);
    cfg = base;
    cfg.trials_per_point = 0;
    CHECK_THROWS_AS(run_sweep(cfg), std::invalid_argument);
    cfg = base;
    cfg.m_r = 1;
    CHECK_THROWS_AS(run_sweep(cfg), std::invalid_argument);
    cfg = base;
    cfg.n_symbols = 30;  // below the cumulant-estimation floor
    CHECK_THROWS_AS(run_sweep(cfg), std::invalid_argument);
    cfg = base;
    cfg.candidates = {Scheme::Qpsk, Scheme::Qpsk};
    CHECK_THROWS_AS(run_sweep(cfg), std::invalid_argument);
    cfg = base;
    cfg.algorithms = {Algorithm::Proposed, Algorithm::Proposed};
    CHECK_THROWS_AS(run_sweep(cfg), std::invalid_argument);
    cfg = base;
    cfg.algorithms.clear();
    CHECK_THROWS_AS(run_sweep(cfg), std::invalid_argument);
    cfg = base;
    cfg.candidates.clear();
    CHECK_THROWS_AS(run_sweep(cfg), std::invalid_argument);
    // perfect-CSI benchmark with an unenumerable joint symbol set
    cfg = base;
    cfg.m_t = 5;
    cfg.m_r = 5;
    cfg.n_symbols = 256;
    CHECK_THROWS_AS(run_sweep(cfg), std::invalid_argument);
    cfg = base;
    cfg.snr_db_grid = {0.0, std::numeric_limits<double>::quiet_NaN()};
    CHECK_THROWS_AS(run_sweep(cfg), std::invalid_argument);
}

TEST_CASE("capture classification matches the in-process decision") {
    ScratchDir dir;
    const auto candidates = default_candidates();
    int checked = 0;
    for (const Scheme scheme : kCandidateOrder) {
        const auto frame = oracles::make_frame(scheme, 2, 4, 256, 12.0,
                                               5000 + static_cast<std::uint64_t>(checked));
        const auto meta = dir.path / ("f" + std::to_string(checked) + ".json");
        const auto data = dir.path / ("f" + std::to_string(checked) + ".bin");
        write_capture(frame, meta, data);

        const auto direct = classify(frame, candidates, Algorithm::Proposed);
        const auto via_file = classify_file(meta, data, candidates, Algorithm::Proposed);
        REQUIRE_FALSE(direct.failed);
        REQUIRE_FALSE(via_file.failed);
        CHECK(*direct.decided == *via_file.decided);
        REQUIRE(direct.ranked.size() == via_file.ranked.size());
        for (std::size_t i = 0; i < direct.ranked.size(); ++i) {
            CHECK(direct.ranked[i].hypothesis == via_file.ranked[i].hypothesis);
            // the capture round trip is bit exact, so scores agree exactly
            CHECK(direct.ranked[i].combined_log == via_file.ranked[i].combined_log);
        }
        ++checked;
    }

    const auto meta0 = dir.path / "f0.json";
    const auto data0 = dir.path / "f0.bin";
    CHECK_THROWS_AS(classify_file(meta0, data0, candidates, Algorithm::AlrtUb),
                    std::invalid_argument);
    CHECK_THROWS_AS(classify_file(dir.path / "nope.json", data0, candidates,
                                  Algorithm::Proposed),
                    std::runtime_error);
}

TEST_CASE("reproduce plans") {
    const auto fig1 = reproduce_plan(1, 100, 7, 2);
    REQUIRE(fig1.size() == 3);
    CHECK(fig1[0].label == "N256");
    CHECK(fig1[1].label == "N512");
    CHECK(fig1[2].label == "N1024");
    CHECK(fig1[0].config.n_symbols == 256);
    CHECK(fig1[2].config.n_symbols == 1024);
    for (const auto& run : fig1) {
        CHECK(run.config.trials_per_point == 100);
        CHECK(run.config.master_seed == 7);
        CHECK(run.config.threads == 2);
        CHECK(run.config.m_t == 2);
        CHECK(run.config.m_r == 4);
        CHECK(run.config.algorithms == std::vector<Algorithm>{Algorithm::Proposed});
        REQUIRE(run.config.snr_db_grid.size() == 11);
        CHECK(run.config.snr_db_grid.front() == doctest::Approx(-10.0));
        CHECK(run.config.snr_db_grid.back() == doctest::Approx(15.0));
    }

    const auto fig2 = reproduce_plan(2, 50, 1, 1);
    REQUIRE(fig2.size() == 3);
    CHECK(fig2[0].label == "MR4");
    CHECK(fig2[1].label == "MR6");
    CHECK(fig2[2].label == "MR8");
    CHECK(fig2[0].config.m_r == 4);
    CHECK(fig2[1].config.m_r == 6);
    CHECK(fig2[2].config.m_r == 8);

    const auto fig3 = reproduce_plan(3, 50, 1, 1);
    REQUIRE(fig3.size() == 1);
    CHECK(fig3[0].label.empty());
    CHECK(fig3[0].config.algorithms ==
          std::vector<Algorithm>{Algorithm::Proposed, Algorithm::EqualWeight,
                                 Algorithm::Product});

    const auto fig4 = reproduce_plan(4, 50, 1, 1);
    REQUIRE(fig4.size() == 1);
    CHECK(fig4[0].config.algorithms ==
          std::vector<Algorithm>{Algorithm::Proposed, Algorithm::AlrtUb});

    CHECK_THROWS_AS(reproduce_plan(5, 50, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(reproduce_plan(0, 50, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(reproduce_plan(1, 0, 1, 1), std::invalid_argument);
}

TEST_CASE("accuracy csv reader rejects malformed input") {
    ScratchDir dir;
    const auto write = [&](const char* name, const std::string& text) {
        const auto p = dir.path / name;
        std::ofstream os(p);
        os << text;
        return p;
    };
    CHECK_THROWS_AS(read_accuracy_csv(dir.path / "missing.csv"), std::runtime_error);
    const auto bad_header = write("a.csv", "snr,alg\n0,proposed\n");
    CHECK_THROWS_AS(read_accuracy_csv(bad_header), std::runtime_error);
    const auto short_row = write(
        "b.csv", "snr_db,algorithm,scheme_true,trials,correct,accuracy\n0,proposed,bpsk,5\n");
    CHECK_THROWS_AS(read_accuracy_csv(short_row), std::runtime_error);
    const auto bad_number = write(
        "c.csv",
        "snr_db,algorithm,scheme_true,trials,correct,accuracy\nx,proposed,bpsk,5,5,1\n");
    CHECK_THROWS_AS(read_accuracy_csv(bad_number), std::runtime_error);
    const auto crlf = write("d.csv",
                            "snr_db,algorithm,scheme_true,trials,correct,accuracy\r\n"
                            "2.5,proposed,bpsk,10,9,0.9\r\n");
    const auto rows = read_accuracy_csv(crlf);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].snr_db == 2.5);
    CHECK(rows[0].algorithm == "proposed");
    CHECK(rows[0].scheme_true == "bpsk");
    CHECK(rows[0].trials == 10);
    CHECK(rows[0].correct == 9);
    CHECK(rows[0].accuracy == 0.9);
}

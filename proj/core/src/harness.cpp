#include "mimomc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "mimomc/iq_io.hpp"

namespace mimomc {

namespace {

using nlohmann::json;

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void validate_config(const SweepConfig& cfg) {
    if (cfg.snr_db_grid.empty()) throw std::invalid_argument("empty SNR grid");
    for (double v : cfg.snr_db_grid)
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite SNR grid value");
    if (cfg.trials_per_point < 1) throw std::invalid_argument("need at least one trial per point");
    if (cfg.m_t < 1 || cfg.m_r < cfg.m_t) throw std::invalid_argument("need m_r >= m_t >= 1");
    if (cfg.n_symbols <= cfg.m_r)
        throw std::invalid_argument("frame length must exceed the receive antenna count");
    if (cfg.n_symbols < 8 * cfg.m_t * cfg.m_t)
        throw std::invalid_argument("frame length too short for blind estimation");
    if (cfg.candidates.empty()) throw std::invalid_argument("no candidate schemes");
    if (cfg.algorithms.empty()) throw std::invalid_argument("no algorithms");
    for (std::size_t i = 0; i < cfg.candidates.size(); ++i)
        for (std::size_t j = i + 1; j < cfg.candidates.size(); ++j)
            if (cfg.candidates[i] == cfg.candidates[j])
                throw std::invalid_argument("duplicate candidate scheme");
    for (std::size_t i = 0; i < cfg.algorithms.size(); ++i)
        for (std::size_t j = i + 1; j < cfg.algorithms.size(); ++j)
            if (cfg.algorithms[i] == cfg.algorithms[j])
                throw std::invalid_argument("duplicate algorithm");
    if (std::find(cfg.algorithms.begin(), cfg.algorithms.end(), Algorithm::AlrtUb) !=
        cfg.algorithms.end())
        for (Scheme s : cfg.candidates)
            alrt_joint_count(build_constellation(s).cardinality(), cfg.m_t);
}

TrialRecord execute_trial(const SweepConfig& cfg,
                          const std::vector<Constellation>& candidates,
                          int snr_index,
                          int scheme_index,
                          int trial_index,
                          Algorithm algorithm) {
    const std::uint64_t seed = derive_seed(cfg.master_seed,
                                           static_cast<std::uint64_t>(snr_index),
                                           static_cast<std::uint64_t>(scheme_index),
                                           static_cast<std::uint64_t>(trial_index));
    Rng rng(seed);
    const double snr_db = cfg.snr_db_grid[static_cast<std::size_t>(snr_index)];
    const double sigma2 = noise_variance_from_snr(snr_db, cfg.m_t);
    const Eigen::MatrixXcd h = draw_channel(cfg.m_t, cfg.m_r, rng);
    const MimoFrame frame = synthesize_frame(candidates[static_cast<std::size_t>(scheme_index)],
                                             h, sigma2, cfg.n_symbols, rng);

    const auto t0 = std::chrono::steady_clock::now();
    const ClassificationResult res = algorithm == Algorithm::AlrtUb
                                         ? classify_alrt_ub(frame, candidates)
                                         : classify(frame, candidates, algorithm);
    const auto t1 = std::chrono::steady_clock::now();

    TrialRecord rec;
    rec.snr_db = snr_db;
    rec.scheme_true = cfg.candidates[static_cast<std::size_t>(scheme_index)];
    rec.scheme_decided = res.decided;
    rec.algorithm = algorithm;
    rec.seed = seed;
    rec.n = cfg.n_symbols;
    rec.m_t = cfg.m_t;
    rec.m_r = cfg.m_r;
    rec.failed = res.failed;
    rec.elapsed_seconds = std::chrono::duration<double>(t1 - t0).count();
    return rec;
}

}  // namespace

std::vector<double> snr_grid(double snr_min, double snr_max, double snr_step) {
    if (!(snr_step > 0.0)) throw std::invalid_argument("SNR step must be positive");
    if (snr_min > snr_max) throw std::invalid_argument("SNR range is empty");
    std::vector<double> grid;
    for (int i = 0;; ++i) {
        const double v = snr_min + i * snr_step;
        if (v > snr_max + 1e-9) break;
        grid.push_back(v);
    }
    return grid;
}

TrialRecord run_trial(const SweepConfig& config,
                      int snr_index,
                      int scheme_index,
                      int trial_index,
                      Algorithm algorithm) {
    validate_config(config);
    if (snr_index < 0 || snr_index >= static_cast<int>(config.snr_db_grid.size()))
        throw std::invalid_argument("snr index out of range");
    if (scheme_index < 0 || scheme_index >= static_cast<int>(config.candidates.size()))
        throw std::invalid_argument("scheme index out of range");
    if (trial_index < 0) throw std::invalid_argument("trial index out of range");

    std::vector<Constellation> candidates;
    candidates.reserve(config.candidates.size());
    for (Scheme s : config.candidates) candidates.push_back(build_constellation(s));
    return execute_trial(config, candidates, snr_index, scheme_index, trial_index, algorithm);
}

SweepResult run_sweep(const SweepConfig& config) {
    validate_config(config);

    std::vector<Constellation> candidates;
    candidates.reserve(config.candidates.size());
    for (Scheme s : config.candidates) candidates.push_back(build_constellation(s));

    const std::size_t n_snr = config.snr_db_grid.size();
    const std::size_t n_sch = config.candidates.size();
    const std::size_t n_tri = static_cast<std::size_t>(config.trials_per_point);
    const std::size_t n_alg = config.algorithms.size();
    const std::size_t n_items = n_snr * n_sch * n_tri;

    SweepResult result;
    result.config = config;
    result.records.resize(n_items * n_alg);

    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto worker = [&] {
        try {
            for (;;) {
                const std::size_t item = next.fetch_add(1, std::memory_order_relaxed);
                if (item >= n_items) return;
                const int si = static_cast<int>(item / (n_sch * n_tri));
                const std::size_t rem = item % (n_sch * n_tri);
                const int ci = static_cast<int>(rem / n_tri);
                const int ti = static_cast<int>(rem % n_tri);
                for (std::size_t ai = 0; ai < n_alg; ++ai)
                    result.records[item * n_alg + ai] =
                        execute_trial(config, candidates, si, ci, ti, config.algorithms[ai]);
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
            next.store(n_items, std::memory_order_relaxed);
        }
    };

    const int n_threads = std::max(1, config.threads);
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    // aggregate in a fixed order so the output is independent of scheduling
    result.cells.reserve(n_snr * n_alg);
    for (std::size_t si = 0; si < n_snr; ++si) {
        for (std::size_t ai = 0; ai < n_alg; ++ai) {
            SweepCell cell;
            cell.snr_db = config.snr_db_grid[si];
            cell.algorithm = config.algorithms[ai];
            cell.trials_per_scheme = config.trials_per_point;
            cell.schemes = config.candidates;
            cell.confusion.assign(n_sch, std::vector<int>(n_sch + 1, 0));
            cell.elapsed_seconds = 0.0;
            for (std::size_t ci = 0; ci < n_sch; ++ci) {
                for (std::size_t ti = 0; ti < n_tri; ++ti) {
                    const std::size_t item = (si * n_sch + ci) * n_tri + ti;
                    const TrialRecord& rec = result.records[item * n_alg + ai];
                    std::size_t col = n_sch;  // failure column
                    if (!rec.failed && rec.scheme_decided) {
                        const auto it = std::find(config.candidates.begin(),
                                                  config.candidates.end(), *rec.scheme_decided);
                        col = static_cast<std::size_t>(it - config.candidates.begin());
                    }
                    ++cell.confusion[ci][col];
                    cell.elapsed_seconds += rec.elapsed_seconds;
                }
            }
            cell.per_scheme_accuracy.resize(n_sch);
            double acc_sum = 0.0;
            for (std::size_t ci = 0; ci < n_sch; ++ci) {
                cell.per_scheme_accuracy[ci] =
                    static_cast<double>(cell.confusion[ci][ci]) / static_cast<double>(n_tri);
                acc_sum += cell.per_scheme_accuracy[ci];
            }
            cell.p_cc = acc_sum / static_cast<double>(n_sch);
            result.cells.push_back(std::move(cell));
        }
    }
    return result;
}

namespace {

json summary_json(const SweepResult& result) {
    const SweepConfig& cfg = result.config;
    json config;
    config["snr_db_grid"] = cfg.snr_db_grid;
    config["trials_per_point"] = cfg.trials_per_point;
    config["n_symbols"] = cfg.n_symbols;
    config["m_t"] = cfg.m_t;
    config["m_r"] = cfg.m_r;
    config["master_seed"] = cfg.master_seed;
    config["threads"] = cfg.threads;
    json cand = json::array();
    for (Scheme s : cfg.candidates) cand.push_back(std::string(scheme_name(s)));
    config["candidates"] = cand;
    json algs = json::array();
    for (Algorithm a : cfg.algorithms) algs.push_back(std::string(algorithm_name(a)));
    config["algorithms"] = algs;

    json cells = json::array();
    for (const SweepCell& cell : result.cells) {
        json jc;
        jc["snr_db"] = cell.snr_db;
        jc["algorithm"] = std::string(algorithm_name(cell.algorithm));
        jc["trials_per_scheme"] = cell.trials_per_scheme;
        jc["p_cc"] = cell.p_cc;
        jc["elapsed_seconds"] = cell.elapsed_seconds;
        json acc;
        json conf;
        for (std::size_t ci = 0; ci < cell.schemes.size(); ++ci) {
            const std::string true_name(scheme_name(cell.schemes[ci]));
            acc[true_name] = cell.per_scheme_accuracy[ci];
            json row;
            for (std::size_t cj = 0; cj < cell.schemes.size(); ++cj)
                row[std::string(scheme_name(cell.schemes[cj]))] = cell.confusion[ci][cj];
            row["failed"] = cell.confusion[ci][cell.schemes.size()];
            conf[true_name] = row;
        }
        jc["per_scheme_accuracy"] = acc;
        jc["confusion"] = conf;
        cells.push_back(jc);
    }

    json doc;
    doc["config"] = config;
    doc["results"] = cells;
    return doc;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error(path.string() + ": cannot open for writing");
    os << text;
    os.close();
    if (!os) throw std::runtime_error(path.string() + ": write failed");
}

}  // namespace

void emit_results(const SweepResult& result,
                  const std::filesystem::path& path,
                  OutputFormat format) {
    const json doc = summary_json(result);
    if (format == OutputFormat::Json) {
        write_file(path, doc.dump(2) + "\n");
        return;
    }

    std::string csv = "snr_db,algorithm,scheme_true,trials,correct,accuracy\n";
    for (const SweepCell& cell : result.cells) {
        for (std::size_t ci = 0; ci < cell.schemes.size(); ++ci) {
            const int correct = cell.confusion[ci][ci];
            csv += format_double(cell.snr_db);
            csv += ',';
            csv += algorithm_name(cell.algorithm);
            csv += ',';
            csv += scheme_name(cell.schemes[ci]);
            csv += ',';
            csv += std::to_string(cell.trials_per_scheme);
            csv += ',';
            csv += std::to_string(correct);
            csv += ',';
            csv += format_double(cell.per_scheme_accuracy[ci]);
            csv += '\n';
        }
    }
    write_file(path, csv);

    std::filesystem::path stem = path;
    stem.replace_extension();
    write_file(stem.string() + "_summary.json", doc.dump(2) + "\n");

    for (const SweepCell& cell : result.cells) {
        std::string conf = "scheme_true,scheme_decided,count\n";
        for (std::size_t ci = 0; ci < cell.schemes.size(); ++ci) {
            for (std::size_t cj = 0; cj <= cell.schemes.size(); ++cj) {
                conf += scheme_name(cell.schemes[ci]);
                conf += ',';
                conf += cj < cell.schemes.size() ? std::string(scheme_name(cell.schemes[cj]))
                                                 : std::string("failed");
                conf += ',';
                conf += std::to_string(cell.confusion[ci][cj]);
                conf += '\n';
            }
        }
        const std::string cell_path = stem.string() + "_confusion_" +
                                      std::string(algorithm_name(cell.algorithm)) + "_snr" +
                                      format_double(cell.snr_db) + ".csv";
        write_file(cell_path, conf);
    }
}

std::vector<AccuracyRow> read_accuracy_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error(path.string() + ": cannot open");
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error(path.string() + ": empty file");
    if (line == "snr_db,algorithm,scheme_true,trials,correct,accuracy\r")
        line.pop_back();
    if (line != "snr_db,algorithm,scheme_true,trials,correct,accuracy")
        throw std::runtime_error(path.string() + ": unexpected header \"" + line + "\"");

    std::vector<AccuracyRow> rows;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 6)
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": expected 6 fields, got " + std::to_string(fields.size()));
        AccuracyRow row;
        try {
            row.snr_db = std::stod(fields[0]);
            row.algorithm = fields[1];
            row.scheme_true = fields[2];
            row.trials = std::stoi(fields[3]);
            row.correct = std::stoi(fields[4]);
            row.accuracy = std::stod(fields[5]);
        } catch (const std::exception& e) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": bad field: " + e.what());
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error(path.string() + ": cannot open");
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

ClassificationResult classify_file(const std::filesystem::path& meta_path,
                                   const std::filesystem::path& payload_path,
                                   const std::vector<Constellation>& candidates,
                                   Algorithm algorithm) {
    const MimoFrame frame = read_capture(meta_path, payload_path);
    if (algorithm == Algorithm::AlrtUb)
        throw std::invalid_argument(
            "perfect-CSI benchmark cannot run on captures (no channel in the sidecar)");
    return classify(frame, candidates, algorithm);
}

std::vector<ReproduceRun> reproduce_plan(int figure,
                                         int trials,
                                         std::uint64_t seed,
                                         int threads) {
    if (trials < 1) throw std::invalid_argument("need at least one trial");

    SweepConfig base;
    base.snr_db_grid = snr_grid(-10.0, 15.0, 2.5);
    base.trials_per_point = trials;
    base.n_symbols = 512;
    base.m_t = 2;
    base.m_r = 4;
    base.master_seed = seed;
    base.threads = threads;

    std::vector<ReproduceRun> runs;
    switch (figure) {
        case 1:
            for (int n : {256, 512, 1024}) {
                SweepConfig c = base;
                c.n_symbols = n;
                runs.push_back({"N" + std::to_string(n), std::move(c)});
            }
            break;
        case 2:
            for (int m_r : {4, 6, 8}) {
                SweepConfig c = base;
                c.m_r = m_r;
                runs.push_back({"MR" + std::to_string(m_r), std::move(c)});
            }
            break;
        case 3: {
            SweepConfig c = base;
            c.algorithms = {Algorithm::Proposed, Algorithm::EqualWeight, Algorithm::Product};
            runs.push_back({"", std::move(c)});
            break;
        }
        case 4: {
            SweepConfig c = base;
            c.algorithms = {Algorithm::Proposed, Algorithm::AlrtUb};
            runs.push_back({"", std::move(c)});
            break;
        }
        default:
            throw std::invalid_argument("figure must be 1, 2, 3 or 4");
    }
    return runs;
}

}  // namespace mimomc

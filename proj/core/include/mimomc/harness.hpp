#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mimomc/classifier.hpp"

namespace mimomc {

struct SweepConfig {
    std::vector<double> snr_db_grid;
    int trials_per_point = 100;
    int n_symbols = 512;
    int m_t = 2;
    int m_r = 4;
    std::vector<Scheme> candidates{kCandidateOrder.begin(), kCandidateOrder.end()};
    std::vector<Algorithm> algorithms{Algorithm::Proposed};
    std::uint64_t master_seed = 1;
    int threads = 1;  // execution detail; results are identical for any value
};

std::vector<double> snr_grid(double snr_min, double snr_max, double snr_step);

struct TrialRecord {
    double snr_db;
    Scheme scheme_true;
    std::optional<Scheme> scheme_decided;  // empty on estimation failure
    Algorithm algorithm;
    std::uint64_t seed;
    int n;
    int m_t;
    int m_r;
    bool failed;
    double elapsed_seconds;
};

// Aggregate for one (snr, algorithm) cell. confusion[i][j] counts true scheme
// i decided as scheme j; the extra final column counts estimation failures,
// which score as misclassifications.
struct SweepCell {
    double snr_db;
    Algorithm algorithm;
    int trials_per_scheme;
    std::vector<Scheme> schemes;
    std::vector<std::vector<int>> confusion;
    std::vector<double> per_scheme_accuracy;
    double p_cc;  // mean of the per-scheme accuracies
    double elapsed_seconds;
};

struct SweepResult {
    SweepConfig config;
    std::vector<SweepCell> cells;        // snr-major, then algorithm order
    std::vector<TrialRecord> records;    // (snr, scheme, trial, algorithm) order
};

// One synthesized frame, classified with one algorithm. The seed depends on
// (master_seed, snr_index, scheme_index, trial_index) only, so different
// algorithms are evaluated on identical realizations.
TrialRecord run_trial(const SweepConfig& config,
                      int snr_index,
                      int scheme_index,
                      int trial_index,
                      Algorithm algorithm);

// Full Monte-Carlo grid. Worker threads claim whole trials from a shared
// counter and write into preassigned slots, so aggregates and record order do
// not depend on the thread count.
SweepResult run_sweep(const SweepConfig& config);

enum class OutputFormat { Csv, Json };

// Csv: accuracy table at `path` (header
// snr_db,algorithm,scheme_true,trials,correct,accuracy), a JSON summary at
// <stem>_summary.json, and one confusion CSV per (snr, algorithm) cell at
// <stem>_confusion_<algorithm>_snr<value>.csv (header
// scheme_true,scheme_decided,count; estimation failures appear as "failed").
// Json: everything in a single document at `path`.
void emit_results(const SweepResult& result,
                  const std::filesystem::path& path,
                  OutputFormat format);

struct AccuracyRow {
    double snr_db;
    std::string algorithm;
    std::string scheme_true;
    int trials;
    int correct;
    double accuracy;
};

std::vector<AccuracyRow> read_accuracy_csv(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);

// Ingest a capture and run the blind classifier on it.
ClassificationResult classify_file(const std::filesystem::path& meta_path,
                                   const std::filesystem::path& payload_path,
                                   const std::vector<Constellation>& candidates,
                                   Algorithm algorithm);

struct ReproduceRun {
    std::string label;  // suffix for the output file, may be empty
    SweepConfig config;
};

// Canned study configurations: 1 = frame-length sweep (N 256/512/1024),
// 2 = receive-antenna sweep (M_R 4/6/8), 3 = fusion-rule comparison,
// 4 = blind pipeline against the perfect-CSI bound.
std::vector<ReproduceRun> reproduce_plan(int figure,
                                         int trials,
                                         std::uint64_t seed,
                                         int threads);

}  // namespace mimomc

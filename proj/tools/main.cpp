#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mimomc/harness.hpp"

namespace {

using namespace mimomc;

std::vector<Scheme> parse_scheme_list(const std::string& csv) {
    std::vector<Scheme> out;
    std::size_t start = 0;
    while (start <= csv.size()) {
        const std::size_t end = csv.find(',', start);
        const std::string tok = csv.substr(start, end == std::string::npos ? end : end - start);
        if (!tok.empty()) {
            const auto s = parse_scheme(tok);
            if (!s) throw CLI::ValidationError("--mods", "unknown scheme \"" + tok + "\"");
            out.push_back(*s);
        }
        if (end == std::string::npos) break;
        start = end + 1;
    }
    if (out.empty()) throw CLI::ValidationError("--mods", "no schemes given");
    return out;
}

std::vector<Algorithm> parse_algorithm_list(const std::string& csv) {
    std::vector<Algorithm> out;
    std::size_t start = 0;
    while (start <= csv.size()) {
        const std::size_t end = csv.find(',', start);
        const std::string tok = csv.substr(start, end == std::string::npos ? end : end - start);
        if (!tok.empty()) {
            const auto a = parse_algorithm(tok);
            if (!a) throw CLI::ValidationError("--algos", "unknown algorithm \"" + tok + "\"");
            out.push_back(*a);
        }
        if (end == std::string::npos) break;
        start = end + 1;
    }
    if (out.empty()) throw CLI::ValidationError("--algos", "no algorithms given");
    return out;
}

void print_cells(const SweepResult& result) {
    std::printf("%8s  %-12s  %8s\n", "snr_db", "algorithm", "p_cc");
    for (const SweepCell& cell : result.cells)
        std::printf("%8.2f  %-12s  %8.4f\n", cell.snr_db,
                    std::string(algorithm_name(cell.algorithm)).c_str(), cell.p_cc);
}

int run_sweep_command(double snr_min, double snr_max, double snr_step, int trials, int symbols,
                      int m_t, int m_r, const std::string& mods, const std::string& algos,
                      std::uint64_t seed, const std::string& out, const std::string& format,
                      int threads) {
    SweepConfig cfg;
    cfg.snr_db_grid = snr_grid(snr_min, snr_max, snr_step);
    cfg.trials_per_point = trials;
    cfg.n_symbols = symbols;
    cfg.m_t = m_t;
    cfg.m_r = m_r;
    cfg.candidates = parse_scheme_list(mods);
    cfg.algorithms = parse_algorithm_list(algos);
    cfg.master_seed = seed;
    cfg.threads = threads;

    const SweepResult result = run_sweep(cfg);
    emit_results(result, out, format == "json" ? OutputFormat::Json : OutputFormat::Csv);
    print_cells(result);
    std::printf("wrote %s\n", out.c_str());
    return 0;
}

int run_classify_file_command(const std::string& meta, const std::string& data,
                              const std::string& mods, const std::string& algo) {
    std::vector<Constellation> candidates;
    for (Scheme s : parse_scheme_list(mods)) candidates.push_back(build_constellation(s));
    const auto a = parse_algorithm(algo);
    if (!a) throw CLI::ValidationError("--algo", "unknown algorithm \"" + algo + "\"");

    const ClassificationResult res = classify_file(meta, data, candidates, *a);
    if (res.failed) {
        std::fprintf(stderr, "blind estimation failed; no decision\n");
        return 2;
    }
    std::printf("decided: %s\n", std::string(scheme_name(*res.decided)).c_str());
    std::printf("%4s  %-6s  %14s  %s\n", "rank", "scheme", "combined_log", "weights");
    int rank = 1;
    for (const HypothesisScore& hs : res.ranked) {
        std::string w;
        for (std::size_t i = 0; i < hs.weights.size(); ++i) {
            if (i) w += " ";
            w += std::to_string(hs.weights[i]);
        }
        std::printf("%4d  %-6s  %14.4f  [%s]\n", rank++,
                    std::string(scheme_name(hs.hypothesis)).c_str(), hs.combined_log, w.c_str());
    }
    return 0;
}

int run_reproduce_command(int figure, int trials, std::uint64_t seed, const std::string& out,
                          const std::string& format, int threads) {
    const auto runs = reproduce_plan(figure, trials, seed, threads);
    std::filesystem::path base(out);
    const std::string ext = format == "json" ? ".json" : ".csv";
    std::filesystem::path stem = base;
    stem.replace_extension();

    for (const ReproduceRun& run : runs) {
        const std::string suffix = run.label.empty() ? "" : "_" + run.label;
        const std::filesystem::path path = stem.string() + suffix + ext;
        std::printf("running%s%s (%zu SNR points, %d trials/point)\n",
                    run.label.empty() ? "" : " ", run.label.c_str(),
                    run.config.snr_db_grid.size(), run.config.trials_per_point);
        const SweepResult result = run_sweep(run.config);
        emit_results(result, path, format == "json" ? OutputFormat::Json : OutputFormat::Csv);
        print_cells(result);
        std::printf("wrote %s\n", path.string().c_str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"blind modulation classification for spatial-multiplexing MIMO"};
    app.require_subcommand(1);

    // sweep
    double snr_min = -10.0, snr_max = 15.0, snr_step = 2.5;
    int trials = 500, symbols = 512, m_t = 2, m_r = 4, threads = 1;
    std::string mods = "bpsk,qpsk,8psk,16qam";
    std::string algos = "proposed";
    std::string algo = "proposed";
    std::uint64_t seed = 1;
    std::string out, format = "csv", meta, data;
    int figure = 0;

    CLI::App* sweep = app.add_subcommand("sweep", "Monte-Carlo accuracy sweep over an SNR grid");
    sweep->add_option("--snr-min", snr_min, "lowest SNR in dB")->capture_default_str();
    sweep->add_option("--snr-max", snr_max, "highest SNR in dB")->capture_default_str();
    sweep->add_option("--snr-step", snr_step, "grid step in dB")->capture_default_str();
    sweep->add_option("--trials", trials, "trials per (SNR, scheme) point")->capture_default_str();
    sweep->add_option("--symbols", symbols, "symbols per frame")->capture_default_str();
    sweep->add_option("--mt", m_t, "transmit antennas")->capture_default_str();
    sweep->add_option("--mr", m_r, "receive antennas")->capture_default_str();
    sweep->add_option("--mods", mods, "comma-separated candidate schemes")->capture_default_str();
    sweep->add_option("--algos", algos, "comma-separated algorithms: proposed, product, equal_weight, alrt_ub")
        ->capture_default_str();
    sweep->add_option("--seed", seed, "master seed")->capture_default_str();
    sweep->add_option("--out", out, "output path")->required();
    sweep->add_option("--format", format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    sweep->add_option("--threads", threads, "worker threads")->capture_default_str();

    CLI::App* cf = app.add_subcommand("classify-file", "classify a recorded IQ capture");
    cf->add_option("--meta", meta, "JSON sidecar path")->required();
    cf->add_option("--data", data, "binary IQ payload path")->required();
    cf->add_option("--mods", mods, "comma-separated candidate schemes")->capture_default_str();
    cf->add_option("--algo", algo, "proposed, product or equal_weight")->capture_default_str();

    CLI::App* rep = app.add_subcommand("reproduce", "run a canned study configuration");
    rep->add_option("--figure", figure, "1=frame length, 2=receive antennas, 3=fusion rules, 4=perfect-CSI bound")
        ->required()
        ->check(CLI::Range(1, 4));
    rep->add_option("--trials", trials, "trials per (SNR, scheme) point")->capture_default_str();
    rep->add_option("--seed", seed, "master seed")->capture_default_str();
    rep->add_option("--out", out, "output path stem")->required();
    rep->add_option("--format", format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    rep->add_option("--threads", threads, "worker threads")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (sweep->parsed())
            return run_sweep_command(snr_min, snr_max, snr_step, trials, symbols, m_t, m_r, mods,
                                     algos, seed, out, format, threads);
        if (cf->parsed()) return run_classify_file_command(meta, data, mods, algo);
        if (rep->parsed()) return run_reproduce_command(figure, trials, seed, out, format, threads);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}

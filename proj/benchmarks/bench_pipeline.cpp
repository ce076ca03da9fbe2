#include <benchmark/benchmark.h>

#include "mimomc/harness.hpp"

namespace {

using namespace mimomc;

MimoFrame make_frame(Scheme scheme, int m_t, int m_r, int n, double snr_db, std::uint64_t seed) {
    Rng rng(seed);
    const auto c = build_constellation(scheme);
    const auto h = draw_channel(m_t, m_r, rng);
    return synthesize_frame(c, h, noise_variance_from_snr(snr_db, m_t), n, rng);
}

void bm_jade_separate(benchmark::State& state) {
    const auto frame = make_frame(Scheme::Qpsk, 2, 4, 512, 10.0, 7);
    for (auto _ : state) {
        auto est = jade_separate(frame.received, frame.m_t, frame.noise_variance);
        benchmark::DoNotOptimize(est.channel_estimate);
    }
}
BENCHMARK(bm_jade_separate);

void bm_mmse_filter(benchmark::State& state) {
    Rng rng(3);
    const auto h = draw_channel(2, 4, rng);
    for (auto _ : state) {
        auto g = mmse_filter(h, 0.5);
        benchmark::DoNotOptimize(g);
    }
}
BENCHMARK(bm_mmse_filter);

void bm_stream_log_likelihood(benchmark::State& state) {
    const auto scheme = static_cast<Scheme>(state.range(0));
    const auto c = build_constellation(scheme);
    Rng rng(11);
    Eigen::VectorXcd est(512);
    for (int k = 0; k < est.size(); ++k)
        est(k) = 0.8 * c.points[rng.index(c.points.size())] + rng.complex_gaussian(0.16);
    for (auto _ : state) {
        const double ll = stream_log_likelihood(est, 0.8, 0.16, c);
        benchmark::DoNotOptimize(ll);
    }
}
BENCHMARK(bm_stream_log_likelihood)->Arg(0)->Arg(1)->Arg(2)->Arg(3);

void bm_blind_hypothesis_16qam(benchmark::State& state) {
    const auto frame = make_frame(Scheme::Qam16, 2, 4, 512, 10.0, 7);
    const auto c = build_constellation(Scheme::Qam16);
    const auto blind = jade_separate(frame.received, frame.m_t, frame.noise_variance);
    for (auto _ : state) {
        auto score = score_hypothesis(frame.received, blind, frame.noise_variance, c,
                                      Algorithm::Proposed);
        benchmark::DoNotOptimize(score.combined_log);
    }
}
BENCHMARK(bm_blind_hypothesis_16qam);

void bm_alrt_ub_hypothesis_16qam(benchmark::State& state) {
    const auto frame = make_frame(Scheme::Qam16, 2, 4, 512, 10.0, 7);
    const auto c = build_constellation(Scheme::Qam16);
    for (auto _ : state) {
        const double ll = alrt_ub_log_likelihood(frame, c);
        benchmark::DoNotOptimize(ll);
    }
}
BENCHMARK(bm_alrt_ub_hypothesis_16qam);

void bm_classify_proposed(benchmark::State& state) {
    const auto frame = make_frame(Scheme::Qpsk, 2, 4, 512, 5.0, 9);
    const auto candidates = default_candidates();
    for (auto _ : state) {
        auto res = classify(frame, candidates, Algorithm::Proposed);
        benchmark::DoNotOptimize(res.decided);
    }
}
BENCHMARK(bm_classify_proposed);

}  // namespace

BENCHMARK_MAIN();

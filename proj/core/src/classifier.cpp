#include "mimomc/classifier.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace mimomc {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using cd = std::complex<double>;

constexpr std::size_t kMaxJointHypotheses = 1u << 16;

}  // namespace

std::string_view algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::Proposed: return "proposed";
        case Algorithm::Product: return "product";
        case Algorithm::EqualWeight: return "equal_weight";
        case Algorithm::AlrtUb: return "alrt_ub";
    }
    return "?";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
    std::string lower(name);
    for (char& ch : lower) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (lower == "proposed") return Algorithm::Proposed;
    if (lower == "product") return Algorithm::Product;
    if (lower == "equal_weight") return Algorithm::EqualWeight;
    if (lower == "alrt_ub") return Algorithm::AlrtUb;
    return std::nullopt;
}

double log_sum_exp(std::span<const double> xs) {
    if (xs.empty()) throw std::invalid_argument("log_sum_exp of nothing");
    const double m = *std::max_element(xs.begin(), xs.end());
    if (!std::isfinite(m)) return m;  // all -inf stays -inf, any +inf/nan propagates
    double sum = 0.0;
    for (double x : xs) sum += std::exp(x - m);
    return m + std::log(sum);
}

double stream_log_likelihood(const VectorXcd& estimates,
                             double gain,
                             double sigma_w2,
                             std::span<const cd> points) {
    if (estimates.size() < 1) throw std::invalid_argument("empty estimate sequence");
    if (points.empty()) throw std::invalid_argument("empty constellation");
    if (!(sigma_w2 >= 1e-12)) throw std::invalid_argument("sigma_w2 below the 1e-12 floor");

    const std::size_t a = points.size();
    std::vector<cd> scaled(a);
    for (std::size_t i = 0; i < a; ++i) scaled[i] = gain * points[i];

    const double inv_s2 = 1.0 / sigma_w2;
    std::vector<double> terms(a);
    double total = -static_cast<double>(estimates.size()) *
                   std::log(static_cast<double>(a) * std::numbers::pi * sigma_w2);
    for (Eigen::Index k = 0; k < estimates.size(); ++k) {
        const cd y = estimates(k);
        for (std::size_t i = 0; i < a; ++i) terms[i] = -std::norm(y - scaled[i]) * inv_s2;
        total += log_sum_exp(terms);
    }
    return total;
}

double stream_log_likelihood(const VectorXcd& estimates,
                             double gain,
                             double sigma_w2,
                             const Constellation& c) {
    return stream_log_likelihood(estimates, gain, sigma_w2,
                                 std::span<const cd>(c.points.data(), c.points.size()));
}

FusedScore fuse_weighted_sum(std::span<const double> stream_loglik) {
    if (stream_loglik.empty()) throw std::invalid_argument("no stream likelihoods");
    for (double x : stream_loglik)
        if (!std::isfinite(x)) throw std::invalid_argument("non-finite stream likelihood");

    std::vector<double> doubled(stream_loglik.size());
    for (std::size_t i = 0; i < stream_loglik.size(); ++i) doubled[i] = 2.0 * stream_loglik[i];
    const double combined = 0.5 * log_sum_exp(doubled);

    FusedScore out;
    out.combined_log = combined;
    out.weights.resize(stream_loglik.size());
    for (std::size_t i = 0; i < stream_loglik.size(); ++i)
        out.weights[i] = std::exp(stream_loglik[i] - combined);
    return out;
}

double fuse_product(std::span<const double> stream_loglik) {
    if (stream_loglik.empty()) throw std::invalid_argument("no stream likelihoods");
    return std::accumulate(stream_loglik.begin(), stream_loglik.end(), 0.0);
}

double fuse_equal_weight(std::span<const double> stream_loglik) {
    if (stream_loglik.empty()) throw std::invalid_argument("no stream likelihoods");
    return log_sum_exp(stream_loglik) - std::log(static_cast<double>(stream_loglik.size()));
}

std::vector<EqualizedStream> equalize_streams(const MatrixXcd& received,
                                              const BlindEstimate& blind,
                                              double noise_variance,
                                              const Constellation& c) {
    const int m_t = static_cast<int>(blind.channel_estimate.cols());

    std::vector<double> phases(static_cast<std::size_t>(m_t));
    for (int i = 0; i < m_t; ++i)
        phases[static_cast<std::size_t>(i)] = estimate_phase(blind.separated_streams.row(i).transpose(), c);

    const MatrixXcd corrected = phase_correct(blind.channel_estimate, phases);
    const MatrixXcd filter = mmse_filter(corrected, noise_variance);
    const MatrixXcd outputs = equalize(filter, received);

    std::vector<EqualizedStream> streams;
    streams.reserve(static_cast<std::size_t>(m_t));
    for (int i = 0; i < m_t; ++i) {
        EqualizedStream st;
        st.estimates = outputs.row(i).transpose();
        st.effective_gain = effective_gain(filter, corrected, i);
        st.distortion_variance = distortion_variance(st.effective_gain);
        st.stream_index = i;
        st.hypothesis = c.scheme;
        streams.push_back(std::move(st));
    }
    return streams;
}

namespace {

struct HypothesisEvaluation {
    std::vector<double> stream_loglik;
    PhaseCorrection phases;
};

HypothesisEvaluation evaluate_hypothesis(const MatrixXcd& received,
                                         const BlindEstimate& blind,
                                         double noise_variance,
                                         const Constellation& c) {
    const int m_t = static_cast<int>(blind.channel_estimate.cols());

    std::vector<double> phases(static_cast<std::size_t>(m_t));
    for (int i = 0; i < m_t; ++i)
        phases[static_cast<std::size_t>(i)] = estimate_phase(blind.separated_streams.row(i).transpose(), c);

    const MatrixXcd corrected = phase_correct(blind.channel_estimate, phases);
    const MatrixXcd filter = mmse_filter(corrected, noise_variance);
    const MatrixXcd outputs = equalize(filter, received);

    HypothesisEvaluation ev;
    ev.phases = {phases, c.scheme};
    ev.stream_loglik.resize(static_cast<std::size_t>(m_t));
    for (int i = 0; i < m_t; ++i) {
        const double gain = effective_gain(filter, corrected, i);
        const double s2 = distortion_variance(gain);
        const VectorXcd est = outputs.row(i).transpose();
        ev.stream_loglik[static_cast<std::size_t>(i)] = stream_log_likelihood(est, gain, s2, c);
    }
    return ev;
}

HypothesisScore fuse_evaluation(HypothesisEvaluation ev, Scheme hypothesis, Algorithm algorithm) {
    HypothesisScore score;
    score.hypothesis = hypothesis;
    score.stream_loglik = std::move(ev.stream_loglik);
    score.phases_used = std::move(ev.phases);
    switch (algorithm) {
        case Algorithm::Proposed: {
            FusedScore f = fuse_weighted_sum(score.stream_loglik);
            score.combined_log = f.combined_log;
            score.weights = std::move(f.weights);
            break;
        }
        case Algorithm::Product:
            score.combined_log = fuse_product(score.stream_loglik);
            break;
        case Algorithm::EqualWeight:
            score.combined_log = fuse_equal_weight(score.stream_loglik);
            score.weights.assign(score.stream_loglik.size(),
                                 1.0 / static_cast<double>(score.stream_loglik.size()));
            break;
        case Algorithm::AlrtUb:
            throw std::invalid_argument("perfect-CSI benchmark has no blind scoring path");
    }
    return score;
}

std::vector<HypothesisScore> rank_scores(std::vector<HypothesisScore> scores) {
    std::stable_sort(scores.begin(), scores.end(),
                     [](const HypothesisScore& a, const HypothesisScore& b) {
                         return a.combined_log > b.combined_log;
                     });
    return scores;
}

void validate_candidates(const std::vector<Constellation>& candidates) {
    if (candidates.empty()) throw std::invalid_argument("no candidate schemes");
}

}  // namespace

HypothesisScore score_hypothesis(const MatrixXcd& received,
                                 const BlindEstimate& blind,
                                 double noise_variance,
                                 const Constellation& c,
                                 Algorithm algorithm) {
    return fuse_evaluation(evaluate_hypothesis(received, blind, noise_variance, c), c.scheme,
                           algorithm);
}

ClassificationResult classify(const MimoFrame& frame,
                              const std::vector<Constellation>& candidates,
                              Algorithm algorithm) {
    if (algorithm == Algorithm::AlrtUb)
        throw std::invalid_argument("use classify_alrt_ub for the perfect-CSI benchmark");
    validate_candidates(candidates);
    if (frame.m_t < 1) throw std::invalid_argument("frame has no m_t");
    if (!(frame.noise_variance > 0.0))
        throw std::invalid_argument("frame noise variance must be positive");

    ClassificationResult result;
    result.algorithm = algorithm;

    BlindEstimate blind;
    try {
        blind = jade_separate(frame.received, frame.m_t, frame.noise_variance);
    } catch (const EstimationFailure&) {
        result.failed = true;
        return result;
    }

    std::vector<HypothesisScore> scores;
    scores.reserve(candidates.size());
    try {
        for (const Constellation& c : candidates)
            scores.push_back(
                fuse_evaluation(evaluate_hypothesis(frame.received, blind, frame.noise_variance, c),
                                c.scheme, algorithm));
    } catch (const EstimationFailure&) {
        result.failed = true;
        return result;
    }

    result.ranked = rank_scores(std::move(scores));
    result.decided = result.ranked.front().hypothesis;
    return result;
}

std::size_t alrt_joint_count(std::size_t cardinality, int m_t) {
    if (m_t < 1) throw std::invalid_argument("m_t must be at least 1");
    std::size_t count = 1;
    for (int i = 0; i < m_t; ++i) {
        if (count > kMaxJointHypotheses / cardinality)
            throw std::invalid_argument("joint hypothesis set too large to enumerate");
        count *= cardinality;
    }
    return count;
}

double alrt_ub_log_likelihood(const MimoFrame& frame, const Constellation& c) {
    if (!frame.channel) throw std::invalid_argument("perfect-CSI benchmark needs the true channel");
    if (!(frame.noise_variance > 0.0))
        throw std::invalid_argument("frame noise variance must be positive");
    const MatrixXcd& h = *frame.channel;
    const int m_t = frame.m_t;
    const int m_r = frame.m_r();
    const int n = frame.n();
    const std::size_t a = c.cardinality();
    const std::size_t joint = alrt_joint_count(a, m_t);

    // precompute H s for every joint symbol vector, mixed-radix over streams
    MatrixXcd hs(m_r, static_cast<Eigen::Index>(joint));
    for (std::size_t j = 0; j < joint; ++j) {
        VectorXcd acc = VectorXcd::Zero(m_r);
        std::size_t digits = j;
        for (int i = 0; i < m_t; ++i) {
            acc += h.col(i) * c.points[digits % a];
            digits /= a;
        }
        hs.col(static_cast<Eigen::Index>(j)) = acc;
    }

    const double inv_s2 = 1.0 / frame.noise_variance;
    std::vector<double> terms(joint);
    double total = 0.0;
    for (int k = 0; k < n; ++k) {
        for (std::size_t j = 0; j < joint; ++j)
            terms[j] =
                -(frame.received.col(k) - hs.col(static_cast<Eigen::Index>(j))).squaredNorm() *
                inv_s2;
        total += log_sum_exp(terms);
    }
    total -= static_cast<double>(n) * m_t * std::log(static_cast<double>(a));
    total -= static_cast<double>(n) * m_r * std::log(std::numbers::pi * frame.noise_variance);
    return total;
}

ClassificationResult classify_alrt_ub(const MimoFrame& frame,
                                      const std::vector<Constellation>& candidates) {
    validate_candidates(candidates);
    ClassificationResult result;
    result.algorithm = Algorithm::AlrtUb;

    std::vector<HypothesisScore> scores;
    scores.reserve(candidates.size());
    for (const Constellation& c : candidates) {
        HypothesisScore s;
        s.hypothesis = c.scheme;
        s.combined_log = alrt_ub_log_likelihood(frame, c);
        s.phases_used.hypothesis = c.scheme;
        scores.push_back(std::move(s));
    }
    result.ranked = rank_scores(std::move(scores));
    result.decided = result.ranked.front().hypothesis;
    return result;
}

}  // namespace mimomc

#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mimomc/blind.hpp"
#include "mimomc/channel.hpp"
#include "mimomc/constellation.hpp"
#include "mimomc/equalizer.hpp"

namespace mimomc {

enum class Algorithm { Proposed, Product, EqualWeight, AlrtUb };

std::string_view algorithm_name(Algorithm a);
std::optional<Algorithm> parse_algorithm(std::string_view name);

// max-subtracted, so it is exact for any spread of inputs
double log_sum_exp(std::span<const double> xs);

// Log-likelihood of one equalized stream under a hypothesized constellation,
// modeling the output as c*s + w with w ~ CN(0, sigma_w2) and a uniform
// symbol prior: sum_k log( (1/|A|) sum_s exp(-|y_k - c s|^2 / sigma_w2) / (pi sigma_w2) ).
double stream_log_likelihood(const Eigen::VectorXcd& estimates,
                             double gain,
                             double sigma_w2,
                             const Constellation& c);

// same, against an explicit point set (the points need not be unit power)
double stream_log_likelihood(const Eigen::VectorXcd& estimates,
                             double gain,
                             double sigma_w2,
                             std::span<const std::complex<double>> points);

struct FusedScore {
    double combined_log;          // log of the l2 norm of the per-stream likelihoods
    std::vector<double> weights;  // unit-norm direction, weights[i] = exp(ll_i - combined)
};

// Weighted-sum fusion with the weights that maximize the combined likelihood
// under a unit-l2 constraint: combined = 0.5 * lse(2 * ll).
FusedScore fuse_weighted_sum(std::span<const double> stream_loglik);

// independence-style product across streams: sum of the log-likelihoods
double fuse_product(std::span<const double> stream_loglik);

// uniform mixture across streams: lse(ll) - log(count)
double fuse_equal_weight(std::span<const double> stream_loglik);

struct HypothesisScore {
    Scheme hypothesis;
    std::vector<double> stream_loglik;  // empty for the perfect-CSI benchmark
    std::vector<double> weights;        // empty unless the rule defines them
    double combined_log;
    PhaseCorrection phases_used;
};

// Per-stream equalization under one hypothesis: estimate each stream's phase,
// correct the blind channel estimate, MMSE-equalize, and package the outputs
// with their gain/distortion statistics.
std::vector<EqualizedStream> equalize_streams(const Eigen::MatrixXcd& received,
                                              const BlindEstimate& blind,
                                              double noise_variance,
                                              const Constellation& c);

HypothesisScore score_hypothesis(const Eigen::MatrixXcd& received,
                                 const BlindEstimate& blind,
                                 double noise_variance,
                                 const Constellation& c,
                                 Algorithm algorithm);

struct ClassificationResult {
    std::optional<Scheme> decided;        // empty when estimation failed
    std::vector<HypothesisScore> ranked;  // descending combined_log, ties keep candidate order
    Algorithm algorithm;
    bool failed = false;
};

// Blind pipeline: one JADE pass, then per-candidate scoring with the chosen
// fusion rule. An EstimationFailure is absorbed into a failed-flagged result.
ClassificationResult classify(const MimoFrame& frame,
                              const std::vector<Constellation>& candidates,
                              Algorithm algorithm);

// Perfect-CSI average-likelihood benchmark: exact enumeration of all
// cardinality^m_t joint symbol vectors per instant. Needs frame.channel.
double alrt_ub_log_likelihood(const MimoFrame& frame, const Constellation& c);

ClassificationResult classify_alrt_ub(const MimoFrame& frame,
                                      const std::vector<Constellation>& candidates);

// joint hypothesis count per instant, guards the enumeration size
std::size_t alrt_joint_count(std::size_t cardinality, int m_t);

}  // namespace mimomc

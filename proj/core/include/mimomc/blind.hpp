#pragma once

#include <Eigen/Dense>
#include <span>
#include <stdexcept>
#include <vector>

#include "mimomc/constellation.hpp"

namespace mimomc {

// Raised when the blind front end cannot produce a usable estimate
// (rank-deficient observations, joint diagonalization not converging).
// Contract violations stay std::invalid_argument.
struct EstimationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct WhitenResult {
    Eigen::MatrixXcd whitened;   // m_t x n
    Eigen::MatrixXcd whitening;  // m_t x m_r
};

// Noise-adjusted PCA whitening: project onto the m_t dominant eigenvectors of
// the sample covariance and rescale by (lambda - sigma_n^2)^{-1/2}. Fails if
// fewer than m_t eigenvalues clear the noise floor.
WhitenResult whiten(const Eigen::MatrixXcd& received, int m_t, double noise_variance);

struct BlindEstimate {
    Eigen::MatrixXcd channel_estimate;   // m_r x m_t, column order arbitrary
    Eigen::MatrixXcd separated_streams;  // m_t x n, unit average power rows
    Eigen::MatrixXcd whitening_matrix;   // m_t x m_r
};

// Fourth-order blind source separation: whiten, accumulate the full set of
// m_t^2 cumulant matrices (with the pseudo-covariance correction so
// non-circular sources such as BPSK are handled), jointly diagonalize by
// complex Jacobi rotations, then invert the unmixing map back to a channel
// estimate. Streams come out in arbitrary order with an arbitrary phase each.
BlindEstimate jade_separate(const Eigen::MatrixXcd& received, int m_t, double noise_variance);

// Power-law phase estimate for one separated stream under a hypothesized
// constellation: (1/P) arg(conj(mu_A) sum_k s(k)^P), reduced to [0, 2 pi / P).
// A degenerate accumulator (|sum| < 1e-12) yields 0.
double estimate_phase(const Eigen::VectorXcd& stream, const Constellation& c);

struct PhaseCorrection {
    std::vector<double> phases;  // one per stream, radians
    Scheme hypothesis;
};

// column m scaled by e^{+j phase[m]}
Eigen::MatrixXcd phase_correct(const Eigen::MatrixXcd& channel_estimate,
                               std::span<const double> phases);

}  // namespace mimomc

#pragma once

#include <Eigen/Dense>
#include <optional>

#include "mimomc/constellation.hpp"
#include "mimomc/rng.hpp"

namespace mimomc {

// One spatial-multiplexing MIMO observation window: received is m_r x n with
// one column per symbol instant. transmitted/channel/scheme are present for
// synthesized frames and absent for ingested captures.
struct MimoFrame {
    Eigen::MatrixXcd received;
    std::optional<Eigen::MatrixXcd> transmitted;
    std::optional<Eigen::MatrixXcd> channel;
    double noise_variance = 0.0;
    std::optional<Scheme> scheme;
    int m_t = 0;

    int m_r() const { return static_cast<int>(received.rows()); }
    int n() const { return static_cast<int>(received.cols()); }
};

// Per-antenna transmit power is fixed at 1, so SNR in dB maps to the total
// noise power as sigma_n^2 = m_t * 10^(-snr_db/10).
double noise_variance_from_snr(double snr_db, int m_t);

// i.i.d. flat Rayleigh entries, CN(0, 1)
Eigen::MatrixXcd draw_channel(int m_t, int m_r, Rng& rng);

MimoFrame synthesize_frame(const Constellation& c,
                           const Eigen::MatrixXcd& channel,
                           double noise_variance,
                           int n,
                           Rng& rng);

}  // namespace mimomc

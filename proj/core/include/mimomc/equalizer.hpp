#pragma once

#include <Eigen/Dense>

#include "mimomc/constellation.hpp"

namespace mimomc {

// G = H (H^H H + sigma_n^2 I)^{-1}, the linear MMSE receive filter for
// unit-power streams. m_r x m_t, one column per stream.
Eigen::MatrixXcd mmse_filter(const Eigen::MatrixXcd& channel, double noise_variance);

// stream estimates G^H r, m_t x n
Eigen::MatrixXcd equalize(const Eigen::MatrixXcd& filter, const Eigen::MatrixXcd& received);

// c_i = Re(g_i^H h_i). The product is real for a matched filter/channel pair;
// a residual imaginary part beyond 1e-6 signals an inconsistent pairing.
double effective_gain(const Eigen::MatrixXcd& filter,
                      const Eigen::MatrixXcd& channel,
                      int stream_index);

// Residual interference-plus-noise power of an MMSE output with gain c:
// c(1 - c), floored at 1e-12. Rejects c outside (0, 1) beyond 1e-9.
double distortion_variance(double gain);

struct EqualizedStream {
    Eigen::VectorXcd estimates;
    double effective_gain;
    double distortion_variance;
    int stream_index;
    Scheme hypothesis;
};

}  // namespace mimomc

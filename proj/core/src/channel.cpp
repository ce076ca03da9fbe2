#include "mimomc/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace mimomc {

double noise_variance_from_snr(double snr_db, int m_t) {
    if (m_t < 1) throw std::invalid_argument("m_t must be at least 1");
    return static_cast<double>(m_t) * std::pow(10.0, -snr_db / 10.0);
}

Eigen::MatrixXcd draw_channel(int m_t, int m_r, Rng& rng) {
    if (m_t < 1) throw std::invalid_argument("m_t must be at least 1");
    if (m_r < m_t) throw std::invalid_argument("need m_r >= m_t");
    Eigen::MatrixXcd h(m_r, m_t);
    for (int j = 0; j < m_t; ++j)
        for (int i = 0; i < m_r; ++i) h(i, j) = rng.complex_gaussian(1.0);
    return h;
}

MimoFrame synthesize_frame(const Constellation& c,
                           const Eigen::MatrixXcd& channel,
                           double noise_variance,
                           int n,
                           Rng& rng) {
    const int m_r = static_cast<int>(channel.rows());
    const int m_t = static_cast<int>(channel.cols());
    if (m_t < 1 || m_r < m_t) throw std::invalid_argument("need m_r >= m_t >= 1");
    if (n < 1) throw std::invalid_argument("frame length must be positive");
    if (noise_variance < 0.0) throw std::invalid_argument("noise variance must be nonnegative");

    Eigen::MatrixXcd s(m_t, n);
    for (int i = 0; i < m_t; ++i) {
        const SymbolSequence seq = draw_symbols(c, static_cast<std::size_t>(n), rng);
        for (int k = 0; k < n; ++k) s(i, k) = seq.values[static_cast<std::size_t>(k)];
    }

    Eigen::MatrixXcd noise(m_r, n);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < m_r; ++i) noise(i, k) = rng.complex_gaussian(noise_variance);

    MimoFrame frame;
    frame.received = channel * s + noise;
    frame.transmitted = std::move(s);
    frame.channel = channel;
    frame.noise_variance = noise_variance;
    frame.scheme = c.scheme;
    frame.m_t = m_t;
    return frame;
}

}  // namespace mimomc

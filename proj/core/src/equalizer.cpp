#include "mimomc/equalizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mimomc {

Eigen::MatrixXcd mmse_filter(const Eigen::MatrixXcd& channel, double noise_variance) {
    if (channel.rows() < channel.cols() || channel.cols() < 1)
        throw std::invalid_argument("need m_r >= m_t >= 1");
    if (!(noise_variance > 0.0)) throw std::invalid_argument("noise variance must be positive");
    if (!channel.allFinite()) throw std::invalid_argument("channel has non-finite entries");

    const Eigen::Index m_t = channel.cols();
    Eigen::MatrixXcd gram = channel.adjoint() * channel;
    gram += noise_variance * Eigen::MatrixXcd::Identity(m_t, m_t);
    Eigen::LLT<Eigen::MatrixXcd> llt(gram);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("mmse_filter: regularized Gram matrix not positive definite");
    // G = H (H^H H + s I)^{-1}; solve against H^H and take the adjoint
    return llt.solve(channel.adjoint()).adjoint();
}

Eigen::MatrixXcd equalize(const Eigen::MatrixXcd& filter, const Eigen::MatrixXcd& received) {
    if (filter.rows() != received.rows())
        throw std::invalid_argument("filter and received antenna counts differ");
    return filter.adjoint() * received;
}

double effective_gain(const Eigen::MatrixXcd& filter,
                      const Eigen::MatrixXcd& channel,
                      int stream_index) {
    if (filter.rows() != channel.rows() || filter.cols() != channel.cols())
        throw std::invalid_argument("filter/channel shape mismatch");
    if (stream_index < 0 || stream_index >= channel.cols())
        throw std::invalid_argument("stream index out of range");

    const std::complex<double> c = filter.col(stream_index).dot(channel.col(stream_index));
    if (std::abs(c.imag()) >= 1e-6)
        throw std::runtime_error("effective gain has imaginary part " +
                                 std::to_string(c.imag()) + "; filter does not match channel");
    return c.real();
}

double distortion_variance(double gain) {
    if (gain < -1e-9 || gain > 1.0 + 1e-9)
        throw std::invalid_argument("effective gain " + std::to_string(gain) +
                                    " outside (0, 1)");
    const double v = gain * (1.0 - gain);
    return std::clamp(v, 1e-12, 0.25 + 1e-12);
}

}  // namespace mimomc

#include "mimomc/blind.hpp"

#include <cmath>
#include <complex>
#include <iostream>
#include <numbers>

namespace mimomc {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using cd = std::complex<double>;

constexpr int kMaxSweeps = 100;

}  // namespace

WhitenResult whiten(const MatrixXcd& received, int m_t, double noise_variance) {
    const int m_r = static_cast<int>(received.rows());
    const int n = static_cast<int>(received.cols());
    if (m_t < 1 || m_r < m_t) throw std::invalid_argument("need m_r >= m_t >= 1");
    if (n <= m_r) throw std::invalid_argument("need more samples than receive antennas");
    if (noise_variance < 0.0) throw std::invalid_argument("noise variance must be nonnegative");

    const MatrixXcd cov = (received * received.adjoint()) / static_cast<double>(n);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> eig(cov);
    if (eig.info() != Eigen::Success) throw EstimationFailure("whiten: eigendecomposition failed");

    const auto& evals = eig.eigenvalues();  // ascending
    const double lambda_max = evals(m_r - 1);
    const double eps = 1e-9 * lambda_max;

    MatrixXcd w(m_t, m_r);
    for (int i = 0; i < m_t; ++i) {
        const int idx = m_r - 1 - i;
        const double excess = evals(idx) - noise_variance;
        if (!(excess > eps))
            throw EstimationFailure(
                "whiten: only " + std::to_string(i) +
                " covariance eigenvalues clear the noise floor, need " + std::to_string(m_t));
        w.row(i) = eig.eigenvectors().col(idx).adjoint() / std::sqrt(excess);
    }
    return {w * received, std::move(w)};
}

BlindEstimate jade_separate(const MatrixXcd& received, int m_t, double noise_variance) {
    const int n = static_cast<int>(received.cols());
    if (m_t < 1) throw std::invalid_argument("m_t must be at least 1");
    if (n < 8 * m_t * m_t) throw std::invalid_argument("too few samples for cumulant estimates");

    auto [z, w] = whiten(received, m_t, noise_variance);
    const int m = m_t;
    const double inv_n = 1.0 / static_cast<double>(n);

    // second-order stats of the whitened data; R is ~identity by construction,
    // C (the pseudo-covariance) is what keeps BPSK-like sources consistent
    const MatrixXcd r2 = (z * z.adjoint()) * inv_n;
    const MatrixXcd c2 = (z * z.transpose()) * inv_n;

    // cum(z_i, z_j*, z_p*, z_q) packed as m^2 matrices indexed by (p, q)
    std::vector<MatrixXcd> q(static_cast<std::size_t>(m) * m, MatrixXcd::Zero(m, m));
    {
        std::vector<MatrixXcd> m4(q.size(), MatrixXcd::Zero(m, m));
        MatrixXcd outer(m, m);
        for (int k = 0; k < n; ++k) {
            outer.noalias() = z.col(k) * z.col(k).adjoint();
            for (int p = 0; p < m; ++p)
                for (int qi = 0; qi < m; ++qi)
                    m4[static_cast<std::size_t>(p) * m + qi].noalias() += outer(qi, p) * outer;
        }
        for (int p = 0; p < m; ++p)
            for (int qi = 0; qi < m; ++qi) {
                MatrixXcd& mat = q[static_cast<std::size_t>(p) * m + qi];
                mat = m4[static_cast<std::size_t>(p) * m + qi] * inv_n;
                mat.noalias() -= r2 * r2(qi, p);
                mat.noalias() -= r2.col(p) * r2.row(qi);
                mat.noalias() -= c2.col(qi) * c2.col(p).adjoint();
            }
    }

    // joint diagonalization by Jacobi rotations over all pairs
    MatrixXcd v = MatrixXcd::Identity(m, m);
    const double threshold = 1e-8 / std::sqrt(static_cast<double>(n));
    bool converged = (m == 1);
    for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
        bool rotated = false;
        for (int p = 0; p < m - 1; ++p) {
            for (int qi = p + 1; qi < m; ++qi) {
                Eigen::Matrix3d g3 = Eigen::Matrix3d::Zero();
                for (const MatrixXcd& mat : q) {
                    Eigen::Vector3cd col;
                    col << mat(p, p) - mat(qi, qi), mat(p, qi) + mat(qi, p),
                        cd(0.0, 1.0) * (mat(qi, p) - mat(p, qi));
                    g3.noalias() += (col * col.adjoint()).real();
                }
                Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(g3);
                Eigen::Vector3d dir = es.eigenvectors().col(2);
                if (dir(0) < 0.0) dir = -dir;

                const double c = std::sqrt(0.5 + 0.5 * dir(0));
                const cd s = 0.5 * cd(dir(1), -dir(2)) / c;
                if (std::abs(s) <= threshold) continue;
                rotated = true;

                // unitary plane rotation [[c, -conj(s)], [s, c]] on (p, qi)
                for (MatrixXcd& mat : q) {
                    const Eigen::RowVectorXcd row_p = mat.row(p);
                    const Eigen::RowVectorXcd row_q = mat.row(qi);
                    mat.row(p) = c * row_p + std::conj(s) * row_q;
                    mat.row(qi) = -s * row_p + c * row_q;
                    const VectorXcd col_p = mat.col(p);
                    const VectorXcd col_q = mat.col(qi);
                    mat.col(p) = c * col_p + s * col_q;
                    mat.col(qi) = -std::conj(s) * col_p + c * col_q;
                }
                const VectorXcd v_p = v.col(p);
                const VectorXcd v_q = v.col(qi);
                v.col(p) = c * v_p + s * v_q;
                v.col(qi) = -std::conj(s) * v_p + c * v_q;
            }
        }
        if (!rotated) converged = true;
    }
    if (!converged)
        throw EstimationFailure("jade: joint diagonalization did not settle within " +
                                std::to_string(kMaxSweeps) + " sweeps");

    const MatrixXcd b = v.adjoint() * w;  // m x m_r unmixing
    MatrixXcd streams = b * received;

    Eigen::VectorXd scales(m);
    for (int i = 0; i < m; ++i) {
        const double power = streams.row(i).squaredNorm() * inv_n;
        if (!(power > 1e-24)) throw EstimationFailure("jade: separated stream has no power");
        scales(i) = std::sqrt(power);
        streams.row(i) /= scales(i);
    }

    MatrixXcd channel = b.completeOrthogonalDecomposition().pseudoInverse();
    for (int i = 0; i < m; ++i) channel.col(i) *= scales(i);
    if (!channel.allFinite()) throw EstimationFailure("jade: channel estimate not finite");

    return {std::move(channel), std::move(streams), std::move(w)};
}

double estimate_phase(const VectorXcd& stream, const Constellation& c) {
    if (stream.size() < 1) throw std::invalid_argument("empty stream");
    const int p = c.power_law_order;

    cd acc{0.0, 0.0};
    for (Eigen::Index k = 0; k < stream.size(); ++k) {
        cd t{1.0, 0.0};
        for (int j = 0; j < p; ++j) t *= stream(k);
        acc += t;
    }
    if (std::abs(acc) < 1e-12) {
        std::clog << "estimate_phase: degenerate moment accumulator, returning 0\n";
        return 0.0;
    }

    const double period = 2.0 * std::numbers::pi / p;
    double theta = std::arg(std::conj(c.reference_moment) * acc) / p;
    theta = std::fmod(theta, period);
    if (theta < 0.0) theta += period;
    return theta;
}

Eigen::MatrixXcd phase_correct(const MatrixXcd& channel_estimate,
                               std::span<const double> phases) {
    if (static_cast<Eigen::Index>(phases.size()) != channel_estimate.cols())
        throw std::invalid_argument("one phase per stream required");
    MatrixXcd out = channel_estimate;
    for (Eigen::Index j = 0; j < out.cols(); ++j)
        out.col(j) *= std::polar(1.0, phases[static_cast<std::size_t>(j)]);
    return out;
}

}  // namespace mimomc

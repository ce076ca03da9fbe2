#include "mimomc/constellation.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mimomc {

namespace {

std::complex<double> ipow(std::complex<double> z, int n) {
    std::complex<double> acc{1.0, 0.0};
    for (int k = 0; k < n; ++k) acc *= z;
    return acc;
}

std::vector<std::complex<double>> raw_points(Scheme scheme) {
    const double r2 = 1.0 / std::sqrt(2.0);
    switch (scheme) {
        case Scheme::Bpsk:
            return {{1.0, 0.0}, {-1.0, 0.0}};
        case Scheme::Qpsk:
            // e^{j(pi/4 + k pi/2)}
            return {{r2, r2}, {-r2, r2}, {-r2, -r2}, {r2, -r2}};
        case Scheme::Psk8: {
            // e^{j pi k / 4}
            return {{1.0, 0.0}, {r2, r2},   {0.0, 1.0},  {-r2, r2},
                    {-1.0, 0.0}, {-r2, -r2}, {0.0, -1.0}, {r2, -r2}};
        }
        case Scheme::Qam16: {
            std::vector<std::complex<double>> pts;
            const double s = 1.0 / std::sqrt(10.0);
            for (int a : {-3, -1, 1, 3})
                for (int b : {-3, -1, 1, 3}) pts.emplace_back(a * s, b * s);
            return pts;
        }
    }
    throw std::invalid_argument("unknown modulation scheme");
}

int power_law_order_of(Scheme scheme) {
    switch (scheme) {
        case Scheme::Bpsk: return 2;
        case Scheme::Qpsk: return 4;
        case Scheme::Psk8: return 8;
        case Scheme::Qam16: return 4;
    }
    throw std::invalid_argument("unknown modulation scheme");
}

}  // namespace

Constellation build_constellation(Scheme scheme) {
    Constellation c;
    c.scheme = scheme;
    c.points = raw_points(scheme);
    c.power_law_order = power_law_order_of(scheme);

    double mean_power = 0.0;
    for (const auto& p : c.points) mean_power += std::norm(p);
    mean_power /= static_cast<double>(c.points.size());
    const double scale = 1.0 / std::sqrt(mean_power);
    for (auto& p : c.points) p *= scale;

    c.reference_moment = constellation_moment(c, c.power_law_order);
    return c;
}

std::vector<Constellation> default_candidates() {
    std::vector<Constellation> out;
    out.reserve(kCandidateOrder.size());
    for (Scheme s : kCandidateOrder) out.push_back(build_constellation(s));
    return out;
}

std::complex<double> constellation_moment(const Constellation& c, int order) {
    if (order < 1) throw std::invalid_argument("moment order must be positive");
    std::complex<double> acc{0.0, 0.0};
    for (const auto& p : c.points) acc += ipow(p, order);
    return acc / static_cast<double>(c.points.size());
}

SymbolSequence draw_symbols(const Constellation& c, std::size_t count, Rng& rng) {
    SymbolSequence seq;
    seq.scheme = c.scheme;
    seq.values.resize(count);
    for (std::size_t k = 0; k < count; ++k)
        seq.values[k] = c.points[rng.index(c.points.size())];
    return seq;
}

std::string_view scheme_name(Scheme s) {
    switch (s) {
        case Scheme::Bpsk: return "bpsk";
        case Scheme::Qpsk: return "qpsk";
        case Scheme::Psk8: return "8psk";
        case Scheme::Qam16: return "16qam";
    }
    return "?";
}

std::optional<Scheme> parse_scheme(std::string_view name) {
    std::string lower(name);
    for (char& ch : lower) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (lower == "bpsk") return Scheme::Bpsk;
    if (lower == "qpsk") return Scheme::Qpsk;
    if (lower == "8psk") return Scheme::Psk8;
    if (lower == "16qam") return Scheme::Qam16;
    return std::nullopt;
}

}  // namespace mimomc

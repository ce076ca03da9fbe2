#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "mimomc/rng.hpp"

namespace mimomc {

enum class Scheme { Bpsk, Qpsk, Psk8, Qam16 };

// Tie-break order for classification decisions and the default candidate set.
inline constexpr std::array<Scheme, 4> kCandidateOrder = {
    Scheme::Bpsk, Scheme::Qpsk, Scheme::Psk8, Scheme::Qam16};

struct Constellation {
    Scheme scheme;
    std::vector<std::complex<double>> points;  // unit average power
    int power_law_order;                       // smallest P with E[s^P] != 0
    std::complex<double> reference_moment;     // E[s^P] over the point set

    std::size_t cardinality() const { return points.size(); }
};

struct SymbolSequence {
    std::vector<std::complex<double>> values;
    Scheme scheme;
};

Constellation build_constellation(Scheme scheme);
std::vector<Constellation> default_candidates();

// E[s^order] over the point set (exact enumeration)
std::complex<double> constellation_moment(const Constellation& c, int order);

SymbolSequence draw_symbols(const Constellation& c, std::size_t count, Rng& rng);

std::string_view scheme_name(Scheme s);
std::optional<Scheme> parse_scheme(std::string_view name);  // case-insensitive

}  // namespace mimomc

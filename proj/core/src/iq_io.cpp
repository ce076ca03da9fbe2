#include "mimomc/iq_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

static_assert(std::endian::native == std::endian::little,
              "capture payloads are little-endian on disk");

namespace mimomc {

namespace {

using nlohmann::json;

[[noreturn]] void io_fail(const std::filesystem::path& p, const std::string& what) {
    throw std::runtime_error(p.string() + ": " + what);
}

}  // namespace

void write_capture(const MimoFrame& frame,
                   const std::filesystem::path& meta_path,
                   const std::filesystem::path& payload_path) {
    const int m_r = frame.m_r();
    const int n = frame.n();
    if (m_r < 1 || n < 1) throw std::invalid_argument("empty frame");
    if (frame.m_t < 1) throw std::invalid_argument("frame has no m_t");

    json meta;
    meta["m_r"] = m_r;
    meta["n"] = n;
    meta["noise_variance"] = frame.noise_variance;
    meta["m_t"] = frame.m_t;

    std::ofstream ms(meta_path);
    if (!ms) io_fail(meta_path, "cannot open for writing");
    ms << meta.dump(2) << '\n';
    ms.close();
    if (!ms) io_fail(meta_path, "write failed");

    std::vector<double> buf;
    buf.reserve(static_cast<std::size_t>(m_r) * static_cast<std::size_t>(n) * 2);
    for (int k = 0; k < n; ++k) {
        for (int i = 0; i < m_r; ++i) {
            buf.push_back(frame.received(i, k).real());
            buf.push_back(frame.received(i, k).imag());
        }
    }
    std::ofstream ps(payload_path, std::ios::binary);
    if (!ps) io_fail(payload_path, "cannot open for writing");
    ps.write(reinterpret_cast<const char*>(buf.data()),
             static_cast<std::streamsize>(buf.size() * sizeof(double)));
    ps.close();
    if (!ps) io_fail(payload_path, "write failed");
}

MimoFrame read_capture(const std::filesystem::path& meta_path,
                       const std::filesystem::path& payload_path) {
    std::ifstream ms(meta_path);
    if (!ms) io_fail(meta_path, "cannot open");
    json meta;
    try {
        ms >> meta;
    } catch (const json::parse_error& e) {
        io_fail(meta_path, std::string("invalid JSON: ") + e.what());
    }

    for (const char* key : {"m_r", "n", "noise_variance", "m_t"})
        if (!meta.contains(key)) io_fail(meta_path, std::string("missing field \"") + key + "\"");

    int m_r = 0, n = 0, m_t = 0;
    double noise_variance = 0.0;
    try {
        m_r = meta.at("m_r").get<int>();
        n = meta.at("n").get<int>();
        m_t = meta.at("m_t").get<int>();
        noise_variance = meta.at("noise_variance").get<double>();
    } catch (const json::exception& e) {
        io_fail(meta_path, std::string("bad field type: ") + e.what());
    }
    if (m_r < 1 || n < 1 || m_t < 1) io_fail(meta_path, "m_r, n, m_t must all be positive");
    if (m_r < m_t) io_fail(meta_path, "need m_r >= m_t");
    if (noise_variance < 0.0) io_fail(meta_path, "noise_variance must be nonnegative");

    std::ifstream ps(payload_path, std::ios::binary | std::ios::ate);
    if (!ps) io_fail(payload_path, "cannot open");
    const auto size = static_cast<std::uint64_t>(ps.tellg());
    ps.seekg(0);

    const std::uint64_t bytes_per_instant = static_cast<std::uint64_t>(m_r) * 2 * sizeof(double);
    const std::uint64_t expected = bytes_per_instant * static_cast<std::uint64_t>(n);
    if (size != expected) {
        std::string msg = "payload is " + std::to_string(size) + " bytes, expected " +
                          std::to_string(expected) + " (n=" + std::to_string(n) +
                          " instants of " + std::to_string(bytes_per_instant) +
                          " bytes for m_r=" + std::to_string(m_r) + ")";
        if (size % bytes_per_instant != 0)
            msg += "; trailing partial instant of " + std::to_string(size % bytes_per_instant) +
                   " bytes starts at offset " + std::to_string(size - size % bytes_per_instant);
        io_fail(payload_path, msg);
    }

    std::vector<double> buf(static_cast<std::size_t>(m_r) * static_cast<std::size_t>(n) * 2);
    ps.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(expected));
    if (ps.gcount() != static_cast<std::streamsize>(expected)) io_fail(payload_path, "short read");

    MimoFrame frame;
    frame.received.resize(m_r, n);
    std::size_t idx = 0;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < m_r; ++i) {
            const double re = buf[idx++];
            const double im = buf[idx++];
            frame.received(i, k) = {re, im};
        }
    frame.noise_variance = noise_variance;
    frame.m_t = m_t;
    return frame;
}

}  // namespace mimomc

#pragma once

#include <filesystem>

#include "mimomc/channel.hpp"

namespace mimomc {

// Capture layout: a JSON sidecar {"m_r", "n", "noise_variance", "m_t"} next to
// a binary payload of little-endian float64 I/Q pairs, time-major then
// antenna: for k = 0..n-1, for antenna i = 0..m_r-1, write I then Q.
void write_capture(const MimoFrame& frame,
                   const std::filesystem::path& meta_path,
                   const std::filesystem::path& payload_path);

// Round-trips write_capture bit-exactly. Ingested frames carry no
// transmitted/channel/scheme fields.
MimoFrame read_capture(const std::filesystem::path& meta_path,
                       const std::filesystem::path& payload_path);

}  // namespace mimomc

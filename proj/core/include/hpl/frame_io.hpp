#pragma once

// Frame ensemble persistence.
//
// Binary layout (all little-endian):
//   char[4]  magic "HPLF"
//   u32      version (1)
//   u32      frame_len
//   u32      n_frames
//   f64      dt [s]
//   f64[n_frames * frame_len]  traces, frame-major
//
// The CSV export holds one frame per row and no header; dt is not stored.

#include <cstdint>
#include <filesystem>

#include "hpl/herald.hpp"

namespace hpl::io {

inline constexpr char kFrameMagic[4] = {'H', 'P', 'L', 'F'};
inline constexpr std::uint32_t kFrameVersion = 1;
inline constexpr std::size_t kFrameHeaderBytes = 24;

void write_frames_binary(const std::filesystem::path& path, const herald::FrameEnsemble& frames);
herald::FrameEnsemble read_frames_binary(const std::filesystem::path& path);

void write_frames_csv(const std::filesystem::path& path, const herald::FrameEnsemble& frames);
/// Every row must have the same number of columns.
herald::FrameEnsemble read_frames_csv(const std::filesystem::path& path, double dt);

/// Dispatches on the extension: ".csv" reads CSV with `dt`, anything else the binary format.
herald::FrameEnsemble read_frames(const std::filesystem::path& path, double dt);

}  // namespace hpl::io

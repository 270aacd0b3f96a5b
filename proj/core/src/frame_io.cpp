#include "hpl/frame_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "hpl/errors.hpp"

namespace hpl::io {

namespace {

template <typename T>
void put_le(std::ostream& out, T value) {
    std::array<unsigned char, sizeof(T)> bytes{};
    std::memcpy(bytes.data(), &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
    std::array<unsigned char, sizeof(T)> bytes{};
    in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T));
    if (!in) throw IoError("truncated frame file");
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    T value;
    std::memcpy(&value, bytes.data(), sizeof(T));
    return value;
}

}  // namespace

void write_frames_binary(const std::filesystem::path& path, const herald::FrameEnsemble& frames) {
    constexpr auto u32_max = std::numeric_limits<std::uint32_t>::max();
    if (frames.frame_len > u32_max || frames.n_frames() > u32_max)
        throw IoError("frame ensemble too large for the HPLF format");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(kFrameMagic, 4);
    put_le<std::uint32_t>(out, kFrameVersion);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(frames.frame_len));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(frames.n_frames()));
    put_le<double>(out, frames.dt);
    if constexpr (std::endian::native == std::endian::little) {
        out.write(reinterpret_cast<const char*>(frames.data.data()),
                  static_cast<std::streamsize>(frames.data.size() * sizeof(double)));
    } else {
        for (double v : frames.data) put_le<double>(out, v);
    }
    if (!out) throw IoError("failed writing " + path.string());
}

herald::FrameEnsemble read_frames_binary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kFrameMagic, 4) != 0) throw IoError(path.string() + " is not an HPLF frame file");
    const auto version = get_le<std::uint32_t>(in);
    if (version != kFrameVersion) throw IoError("unsupported HPLF version " + std::to_string(version));
    const auto frame_len = get_le<std::uint32_t>(in);
    const auto n_frames = get_le<std::uint32_t>(in);
    const auto dt = get_le<double>(in);
    if (frame_len == 0 && n_frames != 0) throw IoError("HPLF header has zero frame length");
    herald::FrameEnsemble frames{dt, frame_len, std::vector<double>(std::size_t{frame_len} * n_frames), {}};
    if constexpr (std::endian::native == std::endian::little) {
        in.read(reinterpret_cast<char*>(frames.data.data()),
                static_cast<std::streamsize>(frames.data.size() * sizeof(double)));
        if (!in) throw IoError("truncated frame file " + path.string());
    } else {
        for (double& v : frames.data) v = get_le<double>(in);
    }
    return frames;
}

void write_frames_csv(const std::filesystem::path& path, const herald::FrameEnsemble& frames) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.precision(17);
    for (std::size_t k = 0; k < frames.n_frames(); ++k) {
        const auto trace = frames.trace(k);
        for (std::size_t j = 0; j < trace.size(); ++j) out << (j ? "," : "") << trace[j];
        out << '\n';
    }
    if (!out) throw IoError("failed writing " + path.string());
}

herald::FrameEnsemble read_frames_csv(const std::filesystem::path& path, double dt) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    herald::FrameEnsemble frames{dt, 0, {}, {}};
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        ++row;
        std::size_t columns = 0;
        std::istringstream fields(line);
        std::string cell;
        while (std::getline(fields, cell, ',')) {
            try {
                frames.data.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw IoError("row " + std::to_string(row) + " of " + path.string() + ": bad number '" + cell + "'");
            }
            ++columns;
        }
        if (frames.frame_len == 0) frames.frame_len = columns;
        if (columns != frames.frame_len)
            throw IoError("row " + std::to_string(row) + " of " + path.string() + " has " + std::to_string(columns) +
                          " columns, expected " + std::to_string(frames.frame_len));
    }
    return frames;
}

herald::FrameEnsemble read_frames(const std::filesystem::path& path, double dt) {
    if (path.extension() == ".csv") return read_frames_csv(path, dt);
    return read_frames_binary(path);
}

}  // namespace hpl::io

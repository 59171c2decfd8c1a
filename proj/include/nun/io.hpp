#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>

#include "nun/core.hpp"

namespace nun::io {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// 8-bit PNG; grayscale loads as 1 channel, everything else as RGB (alpha
/// dropped). Values map linearly to [0,1].
Raster read_png(const std::filesystem::path& path);
/// Grayscale view of any PNG.
MaskMap read_mask_png(const std::filesystem::path& path);

/// 1-channel rasters are written grayscale, 3-channel as RGB. Values are
/// clamped and rounded to the nearest of 256 levels.
void write_png(const std::filesystem::path& path, const Raster& r);
void write_mask_png(const std::filesystem::path& path, const MaskMap& m);

/// Raw tensor: "NUNR", u32 height, u32 width, u32 channels (little-endian),
/// then row-major little-endian float32 values.
void write_raw(const std::filesystem::path& path, const Raster& r);
Raster read_raw(const std::filesystem::path& path);

std::uint8_t quantize(double v);

}  // namespace nun::io

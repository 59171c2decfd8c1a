#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "nun/config.hpp"
#include "nun/core.hpp"

namespace support {

namespace fs = std::filesystem;

/// Fresh empty directory under the system temp dir.
fs::path scratch_dir(const std::string& name);

std::string read_bytes(const fs::path& p);

/// Owning copy of the values, safe to iterate over a temporary.
std::vector<double> values_of(const nun::Raster& r);
std::vector<double> values_of(const nun::MaskMap& m);

nun::Raster random_raster(std::mt19937_64& rng, std::size_t h, std::size_t w, std::size_t c, double lo = 0.0,
                          double hi = 1.0);
nun::MaskMap random_mask(std::mt19937_64& rng, std::size_t h, std::size_t w, double lo = 0.0, double hi = 1.0);
nun::MaskMap random_binary_mask(std::mt19937_64& rng, std::size_t h, std::size_t w);

/// Run config matching the straight-line 2x2 reference (uniform haze t = 1/2,
/// A = 1, clamp/identity proxes, no cue, explicit steps).
nun::RunConfig oracle_config(int stages, int inner);

/// Writes a 2x2 RGB PNG and manifest, runs cmd_segment with raw output and
/// compares every exported value against the reference. Returns an empty
/// string on exact agreement, else a description of the first mismatch.
std::string compare_with_reference(int stages, int inner, const fs::path& work);

struct ToyItem {
    std::string id;
    nun::Raster clean;
    nun::MaskMap mask;
    nun::Raster degraded;
};

/// Synthetic set degraded in memory by `spec`, reseeded per item from `seed`.
std::vector<ToyItem> degraded_toy_set(std::size_t count, std::size_t size, const nun::DegradationSpec& spec,
                                      std::uint64_t seed);

/// Writes a toy set as PNGs plus manifest.json; returns the manifest path.
fs::path write_toy_dataset(const std::vector<ToyItem>& items, const fs::path& dir);

}  // namespace support

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nun/core.hpp"

// Synthetic scenes for tests and demos: a textured background with one
// textured, slightly brighter elliptical object and its exact mask.
namespace nun::toy {

struct Sample {
    std::string id;
    Raster clean;
    MaskMap mask;
};

Sample make_sample(std::uint64_t seed, std::size_t size = 64, std::string id = {});

/// `count` samples with ids toy_000, toy_001, ...
std::vector<Sample> make_set(std::size_t count, std::uint64_t seed, std::size_t size = 64);

}  // namespace nun::toy

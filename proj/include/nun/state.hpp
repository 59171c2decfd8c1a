#pragma once

#include <cstddef>
#include <vector>

#include "nun/core.hpp"

namespace nun {

/// Everything one outer stage produces.
struct StageState {
    int stage_index = 0;  // 0 is the zero-initialised state before stage 1
    MaskMap mask;
    Raster background;
    std::vector<Raster> inner_iterates;
    std::vector<double> quality_scores;
    std::size_t t1_index = 0;
    std::size_t t2_index = 0;
    Raster x_t1;
    Raster x_t2;

    /// M_0 = 0, B_0 = 0, X_0^{T1} = X_0^{T2} = Y.
    static StageState initial(const Raster& y);

    friend bool operator==(const StageState&, const StageState&) = default;
};

}  // namespace nun

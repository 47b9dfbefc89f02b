#pragma once

#include "okm/core.hpp"

namespace okm::recipes {

// 9-D mixture shaped like the SHUTTLE training split: seven labelled classes
// whose sizes follow the original counts (34108, 6748, 2458, 132, 37, 11, 6)
// times `scale` for the five large classes. The two smallest classes (11 + 6
// points) sit away from the bulk and are the intended outliers.
Dataset shuttle_like(std::uint64_t seed, double scale = 1.0);

// 3-D mixture of ten anisotropic blobs, a stand-in for a SKIN subsample.
Dataset skin_like(std::uint64_t seed, Index n = 24000);

// 18-D mixture of ten overlapping blobs, a stand-in for a SUSY subsample.
Dataset susy_like(std::uint64_t seed, Index n = 20000);

}  // namespace okm::recipes

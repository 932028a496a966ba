#pragma once

#include "volgeo/geometry.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace volgeo {

struct VerifyOptions
{
    Index concavity_samples = 100000;
    std::uint64_t seed = 20180723;
    /// Accepted band for convergence slopes (log2 of refinement ratios, Taylor slopes).
    double slope_min = 1.7;
    double slope_max = 2.3;
};

struct CheckOutcome
{
    std::string name;
    bool passed = false;
    std::vector<std::pair<std::string, double>> metrics;
};

struct VerifyResult
{
    std::vector<CheckOutcome> checks;

    bool passed() const;
};

/// Default oracle suite: concavity scans, linearization for b = 0 and b = 0.5, the two
/// identity refinement studies (dim 1 flat, dim 1 with b > 0, dim 2 conformal) and stencil
/// commutation.
VerifyResult run_verification_suite(const VerifyOptions& opts = {});

}  // namespace volgeo

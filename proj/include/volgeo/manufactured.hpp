#pragma once

// Closed-form test fields shared by the verification suite, the CLI and the tests.

#include "volgeo/geometry.hpp"
#include "volgeo/pde.hpp"

namespace volgeo::manufactured {

/// u*(x,t) = t²/2 + c sin(2πx) cos(πt) on the unit circle with a ≡ 1, b = 0; f* = Q(u*).
struct SineSolution
{
    double amplitude = 0.01;

    double u(double x, double t) const;
    double f(double x, double t) const;

    Field sample_u(const SpaceTimeGrid& g) const;
    Field sample_f(const SpaceTimeGrid& g) const;
    /// Problem with target f* and boundary data u*(·,0), u*(·,1).
    ProblemData problem(const SpaceTimeGrid& g) const;
};

/// ψ = sin(2πx/L) sin(πt) (times cos(2πy/L) in dim 2); vanishes on the boundary layers.
Field bump_direction(const SpaceTimeGrid& g);

/// A smooth space-time field with every derivative exercised; not a solution of anything.
Field smooth_test_field(const SpaceTimeGrid& g);

/// φ = amplitude cos(2π frequency x / L), the conformal factor used for dim-2 checks.
SpatialField cos_bump_phi(const SpatialGrid& g, double amplitude, int frequency = 1);

/// Constant-coefficient problem data with zero endpoints on the given metric.
ProblemData plain_problem(const SpaceTimeGrid& g, const Metric& m, double a, double b,
                          Target target);

}  // namespace volgeo::manufactured

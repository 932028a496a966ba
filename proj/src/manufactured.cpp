#include "volgeo/manufactured.hpp"

#include <cmath>
#include <numbers>

namespace volgeo::manufactured {

using std::numbers::pi;

double SineSolution::u(double x, double t) const
{
    return 0.5 * t * t + amplitude * std::sin(2 * pi * x) * std::cos(pi * t);
}

double SineSolution::f(double x, double t) const
{
    const double c = amplitude;
    const double u_tt = 1.0 - c * pi * pi * std::sin(2 * pi * x) * std::cos(pi * t);
    const double u_xx = -4.0 * pi * pi * c * std::sin(2 * pi * x) * std::cos(pi * t);
    const double u_xt = -2.0 * pi * pi * c * std::cos(2 * pi * x) * std::sin(pi * t);
    return u_tt * (u_xx + 1.0) - u_xt * u_xt;
}

Field SineSolution::sample_u(const SpaceTimeGrid& g) const
{
    return Field::sample(g, [&](double x, double, double t) { return u(x, t); });
}

Field SineSolution::sample_f(const SpaceTimeGrid& g) const
{
    return Field::sample(g, [&](double x, double, double t) { return f(x, t); });
}

ProblemData SineSolution::problem(const SpaceTimeGrid& g) const
{
    const Field exact = sample_u(g);
    return ProblemData(g, Metric(g.space), SpatialField(g.space, 1.0), 0.0,
                       Target::field(sample_f(g), 0.0), exact.layer_field(0),
                       exact.layer_field(g.nt - 1));
}

Field bump_direction(const SpaceTimeGrid& g)
{
    const double L = g.space.length;
    Field psi = Field::sample(g, [&](double x, double y, double t) {
        const double spatial =
            std::sin(2 * pi * x / L) * (g.dim() == 2 ? std::cos(2 * pi * y / L) : 1.0);
        return spatial * std::sin(pi * t);
    });
    // sin(π) is not exactly zero in floating point.
    psi.layer(0).setZero();
    psi.layer(g.nt - 1).setZero();
    return psi;
}

Field smooth_test_field(const SpaceTimeGrid& g)
{
    const double L = g.space.length;
    return Field::sample(g, [&](double x, double y, double t) {
        const double X = 2 * pi * x / L;
        const double Y = 2 * pi * y / L;
        double v = 0.5 * t * t + 0.05 * std::sin(X) * std::cos(pi * t) + 0.02 * std::cos(2 * X + t);
        if (g.dim() == 2) {
            v += 0.04 * std::cos(Y) * std::sin(X + pi * t) + 0.03 * std::sin(Y - X) * t * t;
        }
        return v;
    });
}

SpatialField cos_bump_phi(const SpatialGrid& g, double amplitude, int frequency)
{
    return SpatialField::sample(g, [&](double x, double) {
        return amplitude * std::cos(2 * pi * frequency * x / g.length);
    });
}

ProblemData plain_problem(const SpaceTimeGrid& g, const Metric& m, double a, double b,
                          Target target)
{
    return ProblemData(g, m, SpatialField(g.space, a), b, std::move(target),
                       SpatialField(g.space, 0.0), SpatialField(g.space, 0.0));
}

}  // namespace volgeo::manufactured

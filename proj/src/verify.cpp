#include "volgeo/verify.hpp"

#include "volgeo/manufactured.hpp"
#include "volgeo/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace volgeo {

namespace {

using std::numbers::pi;

struct IdentitySetup
{
    std::string name;
    int dim;
    double b;
    bool varying_a;
    bool conformal;
    std::vector<int> nx;
};

ProblemData identity_problem(const IdentitySetup& s, int nx)
{
    const SpaceTimeGrid g(s.dim, nx, nx + 1, 1.0);
    const Metric m = s.conformal ? Metric(g.space, manufactured::cos_bump_phi(g.space, 0.1))
                                 : Metric(g.space);
    ProblemData p = manufactured::plain_problem(g, m, 1.0, s.b, Target::constant(1.0));
    if (s.varying_a) {
        p.a = SpatialField::sample(g.space,
                                   [](double x, double) { return 1.0 + 0.1 * std::cos(2 * pi * x); });
    }
    return p;
}

void add_refinement(VerifyResult& out, const std::string& name, const IdentitySetup& s,
                    double (*check)(const Field&, const ProblemData&), const VerifyOptions& opts)
{
    const RefinementStudy study = refinement_study(s.nx, [&](int nx) {
        const ProblemData p = identity_problem(s, nx);
        return check(manufactured::smooth_test_field(p.grid), p);
    });
    CheckOutcome c;
    c.name = name + "/" + s.name;
    c.passed = true;
    for (std::size_t i = 0; i < study.nx.size(); ++i) {
        c.metrics.emplace_back("error_nx" + std::to_string(study.nx[i]), study.error[i]);
    }
    for (std::size_t i = 0; i < study.ratios.size(); ++i) {
        const double slope = std::log2(study.ratios[i]);
        c.metrics.emplace_back("slope_" + std::to_string(study.nx[i]) + "_"
                                   + std::to_string(study.nx[i + 1]),
                               slope);
        c.passed = c.passed && slope >= opts.slope_min && slope <= opts.slope_max;
    }
    out.checks.push_back(std::move(c));
}

}  // namespace

bool VerifyResult::passed() const
{
    return std::all_of(checks.begin(), checks.end(), [](const CheckOutcome& c) { return c.passed; });
}

VerifyResult run_verification_suite(const VerifyOptions& opts)
{
    VerifyResult out;

    for (const int n : {1, 2}) {
        const ConcavityReport r = check_concavity(opts.concavity_samples, opts.seed + Index(n), n);
        out.checks.push_back({"concavity/n" + std::to_string(n),
                              r.holds(),
                              {{"samples", double(r.samples)},
                               {"max_normalized_eigenvalue", r.max_normalized_eigenvalue},
                               {"max_eigenvalue", r.max_eigenvalue},
                               {"min_normalized_form", r.min_normalized_form}}});

        const RayScan scan = concavity_ray_scan(n, 40);
        const double worst = *std::max_element(scan.max_normalized_eigenvalue.begin(),
                                               scan.max_normalized_eigenvalue.end());
        const double deepest = *std::min_element(scan.min_eigenvalue.begin(), scan.min_eigenvalue.end());
        out.checks.push_back({"concavity_ray/n" + std::to_string(n),
                              worst <= 1e-10,
                              {{"min_q", scan.q.back()},
                               {"max_normalized_eigenvalue", worst},
                               {"min_eigenvalue", deepest}}});
    }

    for (const double b : {0.0, 0.5}) {
        const SpaceTimeGrid g(1, 64, 33, 1.0);
        const manufactured::SineSolution ms;
        ProblemData p = ms.problem(g);
        p.b = b;
        const LinearizationReport r =
            check_linearization(ms.sample_u(g), manufactured::bump_direction(g), p);
        CheckOutcome c{"linearization/b" + std::to_string(b).substr(0, 3), false, {}};
        c.metrics.emplace_back("slope", r.slope);
        for (std::size_t i = 0; i < r.h.size(); ++i) {
            c.metrics.emplace_back("taylor_remainder_h" + std::to_string(i), r.taylor_remainder[i]);
            c.metrics.emplace_back("central_error_h" + std::to_string(i), r.central_error[i]);
        }
        c.passed = r.h.size() >= 2 && r.slope >= opts.slope_min && r.slope <= opts.slope_max;
        out.checks.push_back(std::move(c));
    }

    const std::vector<IdentitySetup> setups{
        {"dim1-flat", 1, 0.0, false, false, {32, 64, 128}},
        {"dim1-b0.5", 1, 0.5, true, false, {32, 64, 128}},
        {"dim2-conformal", 2, 0.5, true, true, {24, 48, 96}},
    };
    for (const auto& s : setups) {
        add_refinement(out, "gradient_identity", s, &check_gradient_identity, opts);
        add_refinement(out, "bochner_identity", s, &check_bochner_identity, opts);
    }

    for (const int dim : {1, 2}) {
        const SpaceTimeGrid g(dim, 32, 9, 1.0);
        const Field u = manufactured::smooth_test_field(g);
        const Metric m(g.space);
        const double defect = check_flat_commutation(u, m);
        const double scale = flat_laplacian(flat_hessian(u).xx).max_abs();
        out.checks.push_back({"flat_commutation/dim" + std::to_string(dim),
                              defect <= 1e-12 * std::max(1.0, scale),
                              {{"defect", defect}, {"scale", scale}}});
    }
    return out;
}

}  // namespace volgeo

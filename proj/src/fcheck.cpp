#include "volgeo/fcheck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace volgeo {

namespace {

template <typename F>
void require_nonnegative(const F& f)
{
    for (Index i = 0; i < f.values.size(); ++i) {
        if (!(f.values[i] >= 0.0)) {
            std::ostringstream os;
            os << "expected a nonnegative function; value " << f.values[i] << " at flat index " << i;
            throw DomainError(os.str());
        }
    }
}

template <typename F>
F sqrt_of(const F& f)
{
    F out = f;
    out.values = f.values.cwiseSqrt();
    return out;
}

template <typename F>
Eigen::VectorXd grad_norm(const VectorOf<F>& d)
{
    Eigen::VectorXd n2 = Eigen::VectorXd::Zero(d[0].values.size());
    for (int i = 0; i < d.dim(); ++i) {
        n2 += d[i].values.cwiseAbs2();
    }
    return n2.cwiseSqrt();
}

template <typename F>
Eigen::VectorXd frobenius(const SymmetricOf<F>& h)
{
    Eigen::VectorXd n2 = h.xx.values.cwiseAbs2();
    if (h.dim == 2) {
        n2 += h.yy.values.cwiseAbs2() + 2.0 * h.xy.values.cwiseAbs2();
    }
    return n2.cwiseSqrt();
}

}  // namespace

double FAdmissibility::max() const
{
    return std::max({sup_f, sup_sqrt_f_t, sup_grad_sqrt_f, sup_f_tt, sup_hess_sqrt_f});
}

FAdmissibility f_admissibility(const Field& f, double rel_threshold)
{
    require_nonnegative(f);
    FAdmissibility r;
    r.sup_f = f.values.maxCoeff();
    const double threshold = rel_threshold * r.sup_f;

    const Field root = sqrt_of(f);
    const TimeDerivatives droot = time_derivatives(root);
    const Eigen::VectorXd grad = grad_norm(partial_gradient(root));
    const Eigen::VectorXd hess = frobenius(flat_hessian(root));
    const TimeDerivatives df = time_derivatives(f);
    r.sup_f_tt = df.u_tt.max_abs();

    for (Index i = 0; i < f.values.size(); ++i) {
        if (!(f.values[i] > threshold)) {
            continue;
        }
        r.sup_sqrt_f_t = std::max(r.sup_sqrt_f_t, std::abs(droot.u_t.values[i]));
        r.sup_grad_sqrt_f = std::max(r.sup_grad_sqrt_f, grad[i]);
        r.sup_hess_sqrt_f = std::max(r.sup_hess_sqrt_f, hess[i]);
    }
    return r;
}

BlockiReport blocki_bound_check(const SpatialField& psi, double rel_threshold)
{
    require_nonnegative(psi);
    const SpatialGrid& g = psi.grid;
    const double threshold = rel_threshold * psi.values.maxCoeff();

    const SpatialSymmetricField hess = flat_hessian(psi);
    BlockiReport r;
    r.sup_lambda_max = -std::numeric_limits<double>::infinity();
    for (Index s = 0; s < g.size(); ++s) {
        double lmax = hess.xx[s];
        if (g.dim == 2) {
            const double mean = 0.5 * (hess.xx[s] + hess.yy[s]);
            lmax = mean + std::hypot(0.5 * (hess.xx[s] - hess.yy[s]), hess.xy[s]);
        }
        r.sup_lambda_max = std::max(r.sup_lambda_max, lmax);
    }
    r.bound = 0.5 * (1.0 + r.sup_lambda_max);

    const Eigen::VectorXd grad = grad_norm(partial_gradient(sqrt_of(psi)));
    r.min_margin = std::numeric_limits<double>::infinity();
    for (Index s = 0; s < g.size(); ++s) {
        if (!(psi[s] > threshold)) {
            continue;
        }
        ++r.checked_nodes;
        r.sup_grad_sqrt = std::max(r.sup_grad_sqrt, grad[s]);
        const double margin = r.bound - grad[s];
        if (margin < r.min_margin) {
            r.min_margin = margin;
            r.argmin = s;
        }
    }
    if (r.checked_nodes == 0) {
        r.min_margin = r.bound;
    }
    return r;
}

GrowthReport gradient_growth_check(const Field& f, double rel_threshold)
{
    require_nonnegative(f);
    const double threshold = rel_threshold * f.values.maxCoeff();
    const Eigen::VectorXd grad_root = grad_norm(partial_gradient(sqrt_of(f)));
    const Index ns = f.grid.spatial_size();

    constexpr double kOverflowGuard = 1e300;
    GrowthReport r;
    for (Index i = 0; i < f.values.size(); ++i) {
        const double v = f.values[i];
        if (!(v > threshold)) {
            continue;
        }
        // |∇f|² / f^{3/2} with ∇f = 2√f ∇√f.
        const double ratio = 4.0 * grad_root[i] * grad_root[i] / std::sqrt(v);
        if (ratio > r.constant) {
            r.constant = ratio;
            r.argmax_node = i % ns;
            r.argmax_layer = int(i / ns);
        }
    }
    if (!std::isfinite(r.constant) || r.constant > kOverflowGuard) {
        r.unbounded = true;
        r.constant = std::numeric_limits<double>::infinity();
    }
    return r;
}

}  // namespace volgeo

#pragma once

// Pointwise algebra of Q(r) = r0 r1 - Σ_{i>=2} r_i² and G = log Q on jets
// r = (u_tt, B_u, u_t1, ..., u_tn).

#include "volgeo/geometry.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <string>

namespace volgeo {

template <typename Scalar>
using Jet = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using JetMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Raised when G or its derivatives are requested outside the cone Q > 0.
class InadmissibleJet : public Error
{
public:
    using Error::Error;
};

inline constexpr double kDefaultAdmissibilityFloor = 1e-12;

template <typename Derived>
typename Derived::Scalar q_value(const Eigen::MatrixBase<Derived>& r)
{
    const Index n = r.size();
    return r[0] * r[1] - r.tail(n - 2).squaredNorm();
}

/// Q^i: (r1, r0, -2 r2, ..., -2 r_{n+1}).
template <typename Derived>
Jet<typename Derived::Scalar> q_grad(const Eigen::MatrixBase<Derived>& r)
{
    const Index n = r.size();
    Jet<typename Derived::Scalar> g(n);
    g[0] = r[1];
    g[1] = r[0];
    g.tail(n - 2) = -2 * r.tail(n - 2);
    return g;
}

/// Q^{i,j}; constant in r.
template <typename Scalar = double>
JetMatrix<Scalar> q_hess(Index jet_size)
{
    JetMatrix<Scalar> h = JetMatrix<Scalar>::Zero(jet_size, jet_size);
    h(0, 1) = h(1, 0) = Scalar(1);
    for (Index i = 2; i < jet_size; ++i) {
        h(i, i) = Scalar(-2);
    }
    return h;
}

namespace detail {

template <typename Scalar>
Scalar checked_q(Scalar q)
{
    if (!(q > Scalar(0))) {
        throw InadmissibleJet("jet outside the cone: Q(r) = " + std::to_string(double(q)));
    }
    return q;
}

}  // namespace detail

template <typename Derived>
typename Derived::Scalar g_value(const Eigen::MatrixBase<Derived>& r)
{
    using std::log;
    return log(detail::checked_q(q_value(r)));
}

/// G^i = Q^i / Q.
template <typename Derived>
Jet<typename Derived::Scalar> g_grad(const Eigen::MatrixBase<Derived>& r)
{
    const auto q = detail::checked_q(q_value(r));
    return q_grad(r) / q;
}

/// G^{i,j} = Q^{i,j}/Q - Q^i Q^j / Q².
template <typename Derived>
JetMatrix<typename Derived::Scalar> g_hess(const Eigen::MatrixBase<Derived>& r)
{
    using Scalar = typename Derived::Scalar;
    const Scalar q = detail::checked_q(q_value(r));
    const Jet<Scalar> dq = q_grad(r);
    return q_hess<Scalar>(r.size()) / q - (dq * dq.transpose()) / (q * q);
}

struct Admissibility
{
    bool admissible = false;
    /// min(r0, r1, Q).
    double margin = 0.0;
};

template <typename Derived>
Admissibility is_admissible(const Eigen::MatrixBase<Derived>& r,
                            double floor = kDefaultAdmissibilityFloor)
{
    const double margin = std::min({double(r[0]), double(r[1]), double(q_value(r))});
    return {margin > floor, margin};
}

}  // namespace volgeo

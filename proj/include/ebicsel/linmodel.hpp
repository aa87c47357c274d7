#pragma once
#include <Eigen/Dense>
#include <ebicsel/error.hpp>
#include <ebicsel/types.hpp>
#include <cmath>
#include <utility>

namespace ebicsel {

/// Smallest-to-largest singular value ratio below which X(s) counts as rank deficient.
inline constexpr double rank_tolerance = 1e-10;

namespace detail {

/**
 * σ_min(r) < tol · σ_max(r) for square upper-triangular r.
 *
 * ||r||_F and ||r⁻¹||_F bracket the extreme singular values within a factor
 * √k each, which settles almost every call; the SVD runs only when the
 * bracket straddles tol.
 */
template <class T>
bool singular_ratio_below(const mat_type<T>& r, T tol)
{
    const index_t k = r.rows();
    const T r_norm = r.norm();
    if (!(r_norm > T(0))) return true;
    const mat_type<T> inv = r.template triangularView<Eigen::Upper>().solve(mat_type<T>::Identity(k, k));
    const T inv_norm = inv.norm();
    if (std::isfinite(inv_norm) && inv_norm > T(0)) {
        const T ratio_lo = T(1) / (inv_norm * r_norm);
        const T ratio_hi = T(k) * ratio_lo;
        if (ratio_lo >= tol) return false;
        if (ratio_hi < tol) return true;
    }
    const vec_type<T> sv = Eigen::BDCSVD<mat_type<T>>(r).singularValues();
    return !(sv(k - 1) >= tol * sv(0)) || sv(0) == T(0);
}

} // namespace detail

template <class ValueType>
struct FittedModel
{
    using value_t = ValueType;
    SupportSet support;
    vec_type<value_t> coefficients;
    value_t rss = 0;
};

/**
 * Unpenalized least squares of y on the columns of x listed in s.
 *
 * The fit goes through a Householder QR of X(s); the rank check uses the
 * singular values of the triangular factor, which equal those of X(s).
 * For s = ∅ the result has no coefficients and rss = ||y||².
 */
template <class XDerived, class YDerived>
FittedModel<typename XDerived::Scalar>
ols_fit(const Eigen::MatrixBase<XDerived>& x,
        const Eigen::MatrixBase<YDerived>& y,
        const SupportSet& s)
{
    using value_t = typename XDerived::Scalar;
    FittedModel<value_t> out;
    out.support = s;
    if (x.rows() != y.rows()) throw InvalidArgument("ols_fit: x and y row counts differ");
    if (s.empty()) {
        out.coefficients.resize(0);
        out.rss = y.squaredNorm();
        return out;
    }
    if (s.size() >= x.rows()) throw InvalidArgument("ols_fit: support size must be below n");
    if (s[s.size() - 1] >= x.cols()) throw InvalidArgument("ols_fit: support index out of range");

    const mat_type<value_t> xs = columns(x, s);
    Eigen::HouseholderQR<mat_type<value_t>> qr(xs);
    const index_t k = s.size();
    const mat_type<value_t> r = qr.matrixQR().topRows(k).template triangularView<Eigen::Upper>();

    if (detail::singular_ratio_below(r, value_t(rank_tolerance))) throw RankDeficient(s);

    vec_type<value_t> qty = qr.householderQ().adjoint() * y;
    out.coefficients = qr.matrixQR().topLeftCorner(k, k)
                           .template triangularView<Eigen::Upper>()
                           .solve(qty.head(k));
    out.rss = (y - xs * out.coefficients).squaredNorm();
    return out;
}

/// ||mu - H(s) mu||², the squared distance from mu to span X(s).
template <class XDerived, class MuDerived>
typename XDerived::Scalar
projection_deficiency(const Eigen::MatrixBase<XDerived>& x,
                      const Eigen::MatrixBase<MuDerived>& mu,
                      const SupportSet& s)
{
    return ols_fit(x, mu, s).rss;
}

/// Extremal eigenvalues (min, max) of X(s)ᵀX(s) / n.
template <class XDerived>
std::pair<typename XDerived::Scalar, typename XDerived::Scalar>
eigen_bounds(const Eigen::MatrixBase<XDerived>& x, const SupportSet& s)
{
    using value_t = typename XDerived::Scalar;
    if (s.empty()) throw InvalidArgument("eigen_bounds: support must be nonempty");
    if (s[s.size() - 1] >= x.cols()) throw InvalidArgument("eigen_bounds: support index out of range");
    const mat_type<value_t> xs = columns(x, s);
    mat_type<value_t> gram = xs.transpose() * xs / value_t(x.rows());
    Eigen::SelfAdjointEigenSolver<mat_type<value_t>> es(gram, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    return {std::max(ev(0), value_t(0)), ev(ev.size() - 1)};
}

} // namespace ebicsel

#pragma once
#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <ebicsel/error.hpp>
#include <ebicsel/types.hpp>
#include <algorithm>
#include <cmath>
#include <vector>

namespace ebicsel {

struct PenaltySpec
{
    enum class Kind { Lasso, Scad };

    Kind kind = Kind::Scad;
    double a = 3.7; // SCAD concavity; ignored by Lasso

    static PenaltySpec lasso() { return {Kind::Lasso, 3.7}; }
    static PenaltySpec scad(double a = 3.7)
    {
        if (!(a > 2.0)) throw InvalidArgument("SCAD concavity parameter must exceed 2");
        return {Kind::Scad, a};
    }
};

template <class T>
inline T soft_threshold(T z, T lambda)
{
    const T m = std::abs(z) - lambda;
    return m > T(0) ? std::copysign(m, z) : T(0);
}

/**
 * Minimizer of ½(z - β)² + SCAD_λ(|β|):
 *   |z| <= 2λ       -> soft-threshold at λ
 *   2λ < |z| <= aλ  -> ((a - 1) z - sign(z) a λ) / (a - 2)
 *   |z| > aλ        -> z
 */
template <class T>
inline T scad_threshold(T z, T lambda, T a)
{
    if (!(a > T(2))) throw InvalidArgument("scad_threshold: a must exceed 2");
    const T az = std::abs(z);
    if (az <= T(2) * lambda) return soft_threshold(z, lambda);
    if (az <= a * lambda) return ((a - T(1)) * z - std::copysign(a * lambda, z)) / (a - T(2));
    return z;
}

/// p_λ(|β|)
template <class T>
inline T penalty_value(const PenaltySpec& pen, T beta, T lambda)
{
    const T t = std::abs(beta);
    if (pen.kind == PenaltySpec::Kind::Lasso) return lambda * t;
    const T a = T(pen.a);
    if (t <= lambda) return lambda * t;
    if (t <= a * lambda) return (T(2) * a * lambda * t - t * t - lambda * lambda) / (T(2) * (a - T(1)));
    return (a + T(1)) * lambda * lambda / T(2);
}

/// p'_λ(t) for t > 0.
template <class T>
inline T penalty_derivative(const PenaltySpec& pen, T t, T lambda)
{
    if (pen.kind == PenaltySpec::Kind::Lasso || t <= lambda) return lambda;
    const T a = T(pen.a);
    if (t <= a * lambda) return (a * lambda - t) / (a - T(1));
    return T(0);
}

template <class T>
inline T univariate_threshold(const PenaltySpec& pen, T z, T lambda)
{
    return pen.kind == PenaltySpec::Kind::Lasso ? soft_threshold(z, lambda)
                                                : scad_threshold(z, lambda, T(pen.a));
}

/// Design with centered, unit-second-moment columns and centered response.
template <class T>
struct StandardizedData
{
    mat_type<T> x;
    vec_type<T> y;
    vec_type<T> center;
    vec_type<T> scale;
    T y_center = 0;

    /// Coefficients in the caller's units (intercept is y_center - centerᵀβ).
    vec_type<T> to_original_scale(const vec_type<T>& beta_std) const
    {
        return beta_std.cwiseQuotient(scale);
    }
};

/// Zero-variance columns are kept as all-zero columns with unit scale.
template <class XDerived, class YDerived>
StandardizedData<typename XDerived::Scalar>
standardize(const Eigen::MatrixBase<XDerived>& x, const Eigen::MatrixBase<YDerived>& y)
{
    using T = typename XDerived::Scalar;
    if (x.rows() != y.rows()) throw InvalidArgument("standardize: x and y row counts differ");
    if (!x.allFinite() || !y.allFinite()) throw InvalidData("standardize: non-finite input");
    StandardizedData<T> out;
    const T n = T(x.rows());
    out.center = x.colwise().mean().transpose();
    out.x = x.rowwise() - out.center.transpose();
    out.scale.resize(x.cols());
    for (index_t j = 0; j < x.cols(); ++j) {
        const T s = std::sqrt(out.x.col(j).squaredNorm() / n);
        if (s > T(0) && s > T(1e-12) * std::max(T(1), std::abs(out.center(j)))) {
            out.scale(j) = s;
            out.x.col(j) /= s;
        } else {
            out.scale(j) = T(1);
            out.x.col(j).setZero();
        }
    }
    out.y_center = y.mean();
    out.y = y.array() - out.y_center;
    return out;
}

struct CdOptions
{
    double tol = 1e-7;        // max coefficient change in a sweep
    long max_iter = 10000;    // sweeps, full or active-set
    bool record_objective = false;
};

template <class T>
struct CdResult
{
    vec_type<T> coefficients;
    bool converged = false;
    long iterations = 0;
    std::vector<T> objective_trace; // one entry per sweep when requested
};

/// (2n)⁻¹||y - Xβ||² + Σ p_λ(|β_j|)
template <class XDerived, class YDerived, class BDerived>
typename XDerived::Scalar
penalized_objective(const Eigen::MatrixBase<XDerived>& x,
                    const Eigen::MatrixBase<YDerived>& y,
                    const Eigen::MatrixBase<BDerived>& beta,
                    const PenaltySpec& pen,
                    typename XDerived::Scalar lambda)
{
    using T = typename XDerived::Scalar;
    T obj = (y - x * beta).squaredNorm() / (T(2) * T(x.rows()));
    for (index_t j = 0; j < beta.size(); ++j) {
        if (beta(j) != T(0)) obj += penalty_value(pen, T(beta(j)), lambda);
    }
    return obj;
}

/**
 * Cyclic coordinate descent for (2n)⁻¹||y - Xβ||² + Σ p_λ(|β_j|) on a design
 * whose columns have unit second moment (or are identically zero).
 *
 * Works on the gradient g = Xᵀ(y - Xβ)/n. Gram columns Xᵀx_j/n are computed
 * the first time β_j leaves zero and kept for later solves, so one solver
 * serves a whole λ path. Sweeps alternate between all coordinates and the
 * current nonzero set; a solve ends once a full sweep, started from an
 * exactly recomputed gradient, moves no coefficient by more than tol.
 */
template <class T>
class CoordinateDescent
{
public:
    using mat_t = mat_type<T>;
    using vec_t = vec_type<T>;

    /// `x` and `y` must outlive the solver.
    CoordinateDescent(const mat_t& x, const vec_t& y, const PenaltySpec& pen, const CdOptions& opts = {})
        : x_(x), y_(y), pen_(pen), opts_(opts)
    {
        const index_t n = x.rows();
        const index_t p = x.cols();
        if (y.rows() != n) throw InvalidArgument("coordinate_descent: x and y row counts differ");
        if (!x.allFinite() || !y.allFinite()) throw InvalidData("coordinate_descent: non-finite input");
        if (pen.kind == PenaltySpec::Kind::Scad && !(pen.a > 2.0)) {
            throw InvalidArgument("coordinate_descent: SCAD a must exceed 2");
        }
        live_.resize(static_cast<size_t>(p));
        for (index_t j = 0; j < p; ++j) {
            const T m2 = x.col(j).squaredNorm() / T(n);
            if (m2 != T(0) && std::abs(m2 - T(1)) > T(1e-6)) {
                throw InvalidArgument("coordinate_descent: columns must have unit second moment");
            }
            live_[static_cast<size_t>(j)] = m2 != T(0);
        }
        slot_.assign(static_cast<size_t>(p), -1);
    }

    CdResult<T> solve(T lambda, const vec_t* warm_start = nullptr)
    {
        const index_t p = x_.cols();
        if (!(lambda > T(0))) throw InvalidArgument("coordinate_descent: lambda must be positive");

        CdResult<T> res;
        res.coefficients = vec_t::Zero(p);
        if (warm_start) {
            if (warm_start->size() != p) throw InvalidArgument("coordinate_descent: warm start has wrong length");
            if (!warm_start->allFinite()) throw InvalidData("coordinate_descent: non-finite warm start");
            res.coefficients = *warm_start;
        }
        auto& beta = res.coefficients;
        refresh_gradient(beta);

        auto update = [&](index_t j) -> T {
            const T old = beta(j);
            const T nb = univariate_threshold(pen_, old + grad_(j), lambda);
            const T d = nb - old;
            if (d != T(0)) {
                beta(j) = nb;
                grad_.noalias() -= d * gram_col(j);
            }
            return std::abs(d);
        };
        auto record = [&]() {
            if (opts_.record_objective) {
                res.objective_trace.push_back(penalized_objective(x_, y_, beta, pen_, lambda));
            }
        };
        record();

        std::vector<index_t> active;
        bool fresh = true; // gradient exact at the start of this full sweep
        while (res.iterations < opts_.max_iter) {
            T change = 0;
            for (index_t j = 0; j < p; ++j) {
                if (live_[static_cast<size_t>(j)]) change = std::max(change, update(j));
            }
            ++res.iterations;
            record();
            if (change < T(opts_.tol)) {
                if (fresh) {
                    res.converged = true;
                    break;
                }
                refresh_gradient(beta);
                fresh = true;
                continue;
            }
            fresh = false;

            active.clear();
            for (index_t j = 0; j < p; ++j) {
                if (beta(j) != T(0)) active.push_back(j);
            }
            while (res.iterations < opts_.max_iter) {
                T inner = 0;
                for (auto j : active) inner = std::max(inner, update(j));
                ++res.iterations;
                record();
                if (inner < T(opts_.tol)) break;
            }
        }
        return res;
    }

private:
    // Exact gradient, from cached Gram columns when every nonzero has one.
    void refresh_gradient(const vec_t& beta)
    {
        index_t nnz = 0;
        bool cached = true;
        for (index_t j = 0; j < beta.size(); ++j) {
            if (beta(j) != T(0)) {
                ++nnz;
                cached = cached && slot_[static_cast<size_t>(j)] >= 0;
            }
        }
        if (!cached || nnz >= x_.rows()) {
            grad_ = x_.transpose() * (y_ - x_ * beta) / T(x_.rows());
            return;
        }
        if (xty_.size() == 0) xty_ = x_.transpose() * y_ / T(x_.rows());
        grad_ = xty_;
        for (index_t j = 0; j < beta.size(); ++j) {
            if (beta(j) != T(0)) grad_.noalias() -= beta(j) * gram_[static_cast<size_t>(slot_[static_cast<size_t>(j)])];
        }
    }

    const vec_t& gram_col(index_t j)
    {
        auto& s = slot_[static_cast<size_t>(j)];
        if (s < 0) {
            s = static_cast<index_t>(gram_.size());
            gram_.push_back(x_.transpose() * x_.col(j) / T(x_.rows()));
        }
        return gram_[static_cast<size_t>(s)];
    }

    const mat_t& x_;
    const vec_t& y_;
    PenaltySpec pen_;
    CdOptions opts_;
    std::vector<char> live_;
    std::vector<index_t> slot_;
    std::vector<vec_t> gram_;
    vec_t xty_;
    vec_t grad_;
};

/// Single solve; see CoordinateDescent.
template <class XDerived, class YDerived>
CdResult<typename XDerived::Scalar>
coordinate_descent(const Eigen::MatrixBase<XDerived>& x,
                   const Eigen::MatrixBase<YDerived>& y,
                   const PenaltySpec& pen,
                   typename XDerived::Scalar lambda,
                   const vec_type<typename XDerived::Scalar>* warm_start = nullptr,
                   const CdOptions& opts = {})
{
    using T = typename XDerived::Scalar;
    const mat_type<T> xm = x;
    const vec_type<T> ym = y;
    CoordinateDescent<T> solver(xm, ym, pen, opts);
    return solver.solve(lambda, warm_start);
}

/**
 * Stationarity residual of β for the penalized objective, in the scale of
 * the gradient g_j = x_jᵀ(y - Xβ)/n:
 *   β_j != 0 -> |g_j - p'_λ(|β_j|) sign(β_j)|
 *   β_j == 0 -> max(0, |g_j| - λ)
 * The maximum over j is returned.
 */
template <class XDerived, class YDerived, class BDerived>
typename XDerived::Scalar
kkt_residual(const Eigen::MatrixBase<XDerived>& x,
             const Eigen::MatrixBase<YDerived>& y,
             const Eigen::MatrixBase<BDerived>& beta,
             const PenaltySpec& pen,
             typename XDerived::Scalar lambda)
{
    using T = typename XDerived::Scalar;
    const vec_type<T> g = x.transpose() * (y - x * beta) / T(x.rows());
    T worst = 0;
    for (index_t j = 0; j < g.size(); ++j) {
        const T b = beta(j);
        T v;
        if (b != T(0)) {
            v = std::abs(g(j) - std::copysign(penalty_derivative(pen, std::abs(b), lambda), b));
        } else {
            v = std::max(T(0), std::abs(g(j)) - lambda);
        }
        worst = std::max(worst, v);
    }
    return worst;
}

struct PathOptions
{
    index_t num_lambdas = 100;
    double lambda_min_ratio = 1e-3;
    /// Path ends before the first λ whose support exceeds this (negative: no cap).
    index_t max_support = -1;
    /// Path ends at (and includes) the first λ whose support reaches this (negative: off).
    index_t stop_at_size = -1;
    CdOptions cd;
};

template <class T>
struct PathResult
{
    T lambda_max = 0;
    std::vector<T> lambdas;
    std::vector<SupportSet> supports;
    std::vector<Eigen::SparseVector<T>> coefficients;
    std::vector<bool> converged;

    size_t size() const { return lambdas.size(); }
};

/// max_j |x_jᵀy| / n: smallest λ at which β = 0 is optimal.
template <class XDerived, class YDerived>
typename XDerived::Scalar
lambda_max(const Eigen::MatrixBase<XDerived>& x, const Eigen::MatrixBase<YDerived>& y)
{
    using T = typename XDerived::Scalar;
    if (x.cols() == 0) return T(0);
    return (x.transpose() * y).cwiseAbs().maxCoeff() / T(x.rows());
}

/**
 * Warm-started solutions along a log-spaced grid from λ_max down to
 * λ_max · lambda_min_ratio. Inputs must already be standardized.
 */
template <class XDerived, class YDerived>
PathResult<typename XDerived::Scalar>
lambda_path(const Eigen::MatrixBase<XDerived>& x,
            const Eigen::MatrixBase<YDerived>& y,
            const PenaltySpec& pen,
            const PathOptions& opts = {})
{
    using T = typename XDerived::Scalar;
    if (opts.num_lambdas < 1) throw InvalidArgument("lambda_path: need at least one lambda");
    if (!(opts.lambda_min_ratio > 0.0 && opts.lambda_min_ratio < 1.0)) {
        throw InvalidArgument("lambda_path: lambda_min_ratio must lie in (0, 1)");
    }
    PathResult<T> out;
    out.lambda_max = lambda_max(x, y);
    const index_t p = x.cols();

    if (!(out.lambda_max > T(0))) {
        // Nothing correlates with y; the path is the empty model.
        out.lambdas.push_back(T(1));
        out.supports.emplace_back();
        out.coefficients.emplace_back(p);
        out.converged.push_back(true);
        return out;
    }

    const mat_type<T> xm = x;
    const vec_type<T> ym = y;
    CoordinateDescent<T> solver(xm, ym, pen, opts.cd);
    const index_t k = opts.num_lambdas;
    vec_type<T> warm = vec_type<T>::Zero(p);
    for (index_t i = 0; i < k; ++i) {
        const T frac = k == 1 ? T(0) : T(i) / T(k - 1);
        const T lam = out.lambda_max * std::pow(T(opts.lambda_min_ratio), frac);
        auto sol = solver.solve(lam, &warm);

        SupportSet::container_t idx;
        for (index_t j = 0; j < p; ++j) {
            if (sol.coefficients(j) != T(0)) idx.push_back(j);
        }
        SupportSet supp(std::move(idx));
        if (opts.max_support >= 0 && supp.size() > opts.max_support) break;

        out.lambdas.push_back(lam);
        out.coefficients.push_back(sol.coefficients.sparseView());
        out.converged.push_back(sol.converged);
        out.supports.push_back(std::move(supp));
        warm = std::move(sol.coefficients);

        if (opts.stop_at_size >= 0 && out.supports.back().size() >= opts.stop_at_size) break;
    }
    return out;
}

} // namespace ebicsel

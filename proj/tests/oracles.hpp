#pragma once
// Reference computations that share no code with the library.
#include <Eigen/Dense>
#include <ebicsel/random.hpp>
#include <cmath>
#include <cstdint>
#include <vector>

namespace oracle {

/// Pascal's triangle in exact integers, rows 0..60.
inline std::vector<std::vector<std::uint64_t>> pascal_rows()
{
    std::vector<std::vector<std::uint64_t>> c(61);
    for (int p = 0; p <= 60; ++p) {
        c[p].assign(p + 1, 1);
        for (int j = 1; j < p; ++j) c[p][j] = c[p - 1][j - 1] + c[p - 1][j];
    }
    return c;
}

/// Q(a, x) for integer a: e^{-x} Σ_{k<a} x^k / k!.
inline double gamma_q_integer(int a, double x)
{
    double term = 1, sum = 1;
    for (int k = 1; k < a; ++k) {
        term *= x / k;
        sum += term;
    }
    return std::exp(-x) * sum;
}

inline double phi(double x)
{
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

/// Lasso minimizer of (2n)⁻¹||y - Xb||² + λ||b||₁ by FISTA with restart.
inline Eigen::VectorXd fista_lasso(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda,
                                   int iters = 200000)
{
    const double n = static_cast<double>(x.rows());
    const Eigen::MatrixXd gram = x.transpose() * x / n;
    const Eigen::VectorXd xty = x.transpose() * y / n;
    const double step = 1.0 / Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gram).eigenvalues().maxCoeff();
    auto objective = [&](const Eigen::VectorXd& b) {
        return (y - x * b).squaredNorm() / (2 * n) + lambda * b.lpNorm<1>();
    };
    Eigen::VectorXd b = Eigen::VectorXd::Zero(x.cols()), z = b, prev = b;
    double t = 1, last = objective(b);
    for (int it = 0; it < iters; ++it) {
        const Eigen::VectorXd g = z - step * (gram * z - xty);
        for (Eigen::Index j = 0; j < b.size(); ++j) {
            const double v = g(j), s = step * lambda;
            b(j) = v > s ? v - s : (v < -s ? v + s : 0.0);
        }
        const double now = objective(b);
        if (now > last) { // restart momentum
            t = 1;
            z = b;
        } else {
            const double t_next = (1 + std::sqrt(1 + 4 * t * t)) / 2;
            z = b + ((t - 1) / t_next) * (b - prev);
            t = t_next;
        }
        if ((b - prev).lpNorm<Eigen::Infinity>() < 1e-15 && it > 100) break;
        prev = b;
        last = now;
    }
    return b;
}

inline double lasso_objective(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& b,
                              double lambda)
{
    return (y - x * b).squaredNorm() / (2.0 * static_cast<double>(x.rows())) + lambda * b.lpNorm<1>();
}

/// SCAD penalty written out from its derivative, integrated piecewise.
inline double scad(double t, double lambda, double a)
{
    t = std::abs(t);
    if (t <= lambda) return lambda * t;
    if (t <= a * lambda) return lambda * lambda + (a * lambda * (t - lambda) - (t * t - lambda * lambda) / 2) / (a - 1);
    return lambda * lambda + (a * lambda * (a * lambda - lambda) - (a * a * lambda * lambda - lambda * lambda) / 2) / (a - 1);
}

/// argmin_b ½(z - b)² + scad(b) by a coarse grid then golden-section refinement.
inline double scad_grid_minimizer(double z, double lambda, double a)
{
    auto f = [&](double b) { return 0.5 * (z - b) * (z - b) + scad(b, lambda, a); };
    const double lo = -std::abs(z) - 1, hi = std::abs(z) + 1;
    const int grid = 200000;
    double best = 0, best_f = f(0);
    for (int i = 0; i <= grid; ++i) {
        const double b = lo + (hi - lo) * i / grid;
        if (f(b) < best_f) {
            best_f = f(b);
            best = b;
        }
    }
    double l = best - (hi - lo) / grid, r = best + (hi - lo) / grid;
    const double g = (std::sqrt(5.0) - 1) / 2;
    for (int it = 0; it < 100; ++it) {
        const double m1 = r - g * (r - l), m2 = l + g * (r - l);
        if (f(m1) < f(m2)) r = m2;
        else l = m1;
    }
    const double refined = (l + r) / 2;
    return f(refined) < best_f ? refined : best;
}

/// Gaussian matrix with i.i.d. N(0,1) entries.
inline Eigen::MatrixXd gaussian(ebicsel::RandomStream& rng, Eigen::Index rows, Eigen::Index cols)
{
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
    return m;
}

/// Columns centered with unit mean square.
inline Eigen::MatrixXd standardized(Eigen::MatrixXd x)
{
    const double n = static_cast<double>(x.rows());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        x.col(j).array() -= x.col(j).mean();
        x.col(j) /= std::sqrt(x.col(j).squaredNorm() / n);
    }
    return x;
}

} // namespace oracle

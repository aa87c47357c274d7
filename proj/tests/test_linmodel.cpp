#include "oracles.hpp"
#include <doctest.h>
#include <ebicsel/error.hpp>
#include <ebicsel/linmodel.hpp>

using namespace ebicsel;

TEST_SUITE("linmodel")
{
    TEST_CASE("least squares matches the normal equations")
    {
        RandomStream rng(3);
        const Eigen::MatrixXd x = oracle::gaussian(rng, 40, 8);
        const Eigen::VectorXd y = oracle::gaussian(rng, 40, 1);
        const SupportSet s{0, 2, 5, 7};
        const Eigen::MatrixXd xs = columns(x, s);
        const Eigen::VectorXd expected = (xs.transpose() * xs).ldlt().solve(xs.transpose() * y);
        const auto fit = ols_fit(x, y, s);
        CHECK((fit.coefficients - expected).norm() < 1e-12);
        CHECK(fit.rss == doctest::Approx((y - xs * expected).squaredNorm()).epsilon(1e-12));
    }

    TEST_CASE("empty support leaves the whole response as residual")
    {
        Eigen::MatrixXd x = Eigen::MatrixXd::Ones(5, 2);
        Eigen::VectorXd y(5);
        y << 1, 2, 3, 4, 5;
        const auto fit = ols_fit(x, y, {});
        CHECK(fit.coefficients.size() == 0);
        CHECK(fit.rss == 55.0);
    }

    TEST_CASE("rank deficiency and size limits")
    {
        RandomStream rng(4);
        Eigen::MatrixXd x = oracle::gaussian(rng, 20, 4);
        x.col(3) = x.col(1);
        const Eigen::VectorXd y = oracle::gaussian(rng, 20, 1);
        CHECK_THROWS_AS(ols_fit(x, y, SupportSet{1, 3}), RankDeficient);
        try {
            ols_fit(x, y, SupportSet{0, 1, 3});
        } catch (const RankDeficient& e) {
            CHECK(e.support() == SupportSet{0, 1, 3});
        }
        CHECK_NOTHROW(ols_fit(x, y, SupportSet{0, 1, 2}));
        const Eigen::MatrixXd wide = oracle::gaussian(rng, 3, 5);
        CHECK_THROWS_AS(ols_fit(wide, Eigen::VectorXd::Ones(3), SupportSet{0, 1, 2}), InvalidArgument);
        CHECK_THROWS_AS(ols_fit(x, y, SupportSet{9}), InvalidArgument);
    }

    TEST_CASE("nearly collinear columns count as deficient")
    {
        RandomStream rng(8);
        Eigen::MatrixXd x = oracle::gaussian(rng, 30, 3);
        x.col(2) = x.col(0) + 1e-13 * x.col(1);
        const Eigen::VectorXd y = oracle::gaussian(rng, 30, 1);
        CHECK_THROWS_AS(ols_fit(x, y, SupportSet{0, 2}), RankDeficient);
        x.col(2) = x.col(0) + 1e-4 * x.col(1);
        CHECK_NOTHROW(ols_fit(x, y, SupportSet{0, 2}));
    }

    TEST_CASE("projection deficiency vanishes on the span")
    {
        RandomStream rng(5);
        const Eigen::MatrixXd x = oracle::gaussian(rng, 30, 6);
        const Eigen::VectorXd mu = 2 * x.col(1) - x.col(4);
        CHECK(projection_deficiency(x, mu, SupportSet{1, 4}) < 1e-20);
        CHECK(projection_deficiency(x, mu, SupportSet{1}) > 1.0);
    }

    TEST_CASE("eigen bounds of a known Gram matrix")
    {
        // X = √3 Lᵀ gives XᵀX / 3 = L Lᵀ = G with eigenvalues {1, 3, 3}.
        Eigen::Matrix3d g;
        g << 2, 1, 0, 1, 2, 0, 0, 0, 3;
        const Eigen::Matrix3d l = g.llt().matrixL();
        const Eigen::MatrixXd x = std::sqrt(3.0) * l.transpose();
        const auto [lo, hi] = eigen_bounds(x, SupportSet{0, 1, 2});
        CHECK(lo == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(hi == doctest::Approx(3.0).epsilon(1e-12));
        const auto [lo2, hi2] = eigen_bounds(x, SupportSet{0, 1});
        CHECK(lo2 == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(hi2 == doctest::Approx(3.0).epsilon(1e-12));
        CHECK_THROWS_AS(eigen_bounds(x, SupportSet{}), InvalidArgument);
    }
}

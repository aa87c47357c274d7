#include "oracles.hpp"
#include <doctest.h>
#include <ebicsel/error.hpp>
#include <ebicsel/simgen.hpp>
#include <cmath>

using namespace ebicsel;

namespace {

CovarianceFactor make_factor(CovarianceKind kind, index_t p, std::uint64_t seed = 1)
{
    CovarianceSpec spec;
    spec.kind = kind;
    spec.p = p;
    RandomStream rng(seed);
    return covariance_factor(spec, rng);
}

Eigen::MatrixXd sample_correlation(const Eigen::MatrixXd& z)
{
    const Eigen::MatrixXd c = z.rowwise() - z.colwise().mean();
    const Eigen::MatrixXd cov = c.transpose() * c / static_cast<double>(z.rows() - 1);
    const Eigen::VectorXd s = cov.diagonal().cwiseSqrt().cwiseInverse();
    return s.asDiagonal() * cov * s.asDiagonal();
}

} // namespace

TEST_SUITE("simgen")
{
    TEST_CASE("schedule table and extrapolation")
    {
        CHECK(divergence_schedule(100, 1) == ScheduleEntry{100, 1, 4, 150});
        CHECK(divergence_schedule(200, 1) == ScheduleEntry{200, 1, 6, 595});
        CHECK(divergence_schedule(500, 2) == ScheduleEntry{500, 2, 16, 6655});
        CHECK(divergence_schedule(1000, 2) == ScheduleEntry{1000, 2, 18, 74622});
        const auto other = divergence_schedule(300, 2);
        CHECK(other.p0 == 2 * std::llround(std::pow(300.0, 0.325)));
        CHECK_THROWS_AS(divergence_schedule(100, 0), InvalidArgument);
    }

    TEST_CASE("support placement")
    {
        const auto even = place_support(150, 4, SupportPlacement::EvenlySpaced);
        CHECK(even == SupportSet{18, 56, 93, 131});
        CHECK(place_support(150, 4, SupportPlacement::First) == SupportSet{0, 1, 2, 3});
        CHECK(place_support(10, 10, SupportPlacement::EvenlySpaced) == SupportSet::iota(10));
        // with 50-wide blocks the features land in distinct blocks
        const auto spread = place_support(595, 6, SupportPlacement::EvenlySpaced);
        for (index_t k = 1; k < spread.size(); ++k) CHECK(spread[k] / 50 != spread[k - 1] / 50);
    }

    TEST_CASE("coefficient law constants")
    {
        const BetaSpec spec;
        // σ solving P(|z| >= 0.1) = 0.25, found by bisection on the normal cdf
        double lo = 0.01, hi = 1.0;
        for (int i = 0; i < 200; ++i) {
            const double mid = (lo + hi) / 2;
            (2 * (1 - oracle::phi(0.1 / mid)) < 0.25 ? lo : hi) = mid;
        }
        CHECK(spec.z_sd() == doctest::Approx(lo).epsilon(1e-12));
        CHECK(spec.z_sd() == doctest::Approx(0.0869301).epsilon(1e-6));
        CHECK(spec.magnitude_floor() == doctest::Approx(std::pow(100.0, -0.1625)).epsilon(1e-15));
    }

    TEST_CASE("coefficient draws: floor, sign frequency, spread")
    {
        const BetaSpec spec;
        RandomStream rng(77);
        const auto b = sample_beta(spec, 100000, rng);
        const double floor = spec.magnitude_floor();
        int negative = 0;
        int beyond = 0;
        for (index_t i = 0; i < b.size(); ++i) {
            REQUIRE(std::abs(b(i)) >= floor);
            negative += b(i) < 0;
            beyond += std::abs(b(i)) - floor >= 0.1;
        }
        CHECK(negative / 1e5 == doctest::Approx(0.4).epsilon(0.02));
        CHECK(beyond / 1e5 == doctest::Approx(0.25).epsilon(0.03));
    }

    TEST_CASE("signal variance against the closed form for independent features")
    {
        const BetaSpec spec;
        const double a = spec.magnitude_floor(), s = spec.z_sd();
        const double e_b2 = a * a + 2 * a * s * std::sqrt(2 / M_PI) + s * s;
        CHECK(4 * e_b2 == doctest::Approx(1.18825873716949).epsilon(1e-12));
        const double mc = expected_signal_variance(Eigen::MatrixXd::Identity(4, 4), spec);
        CHECK(mc == doctest::Approx(4 * e_b2).epsilon(2e-3));

        const auto factor = make_factor(CovarianceKind::PowerDecay, 150);
        const auto supp = place_support(150, 4, SupportPlacement::EvenlySpaced);
        const double s2 = calibrate_sigma2(0.6, factor, spec, supp);
        CHECK(s2 == doctest::Approx(expected_signal_variance(factor.submatrix(supp), spec) * 0.4 / 0.6).epsilon(1e-14));
    }

    TEST_CASE("power-decay correlations")
    {
        const auto f = make_factor(CovarianceKind::PowerDecay, 6);
        CHECK(f.correlation(2, 5) == doctest::Approx(0.125));
        CHECK(f.correlation(3, 3) == 1.0);
        RandomStream rng(3);
        const auto z = sample_design(f, 40000, rng);
        const auto c = sample_correlation(z);
        for (index_t i = 0; i < 6; ++i)
            for (index_t j = 0; j < 6; ++j) CHECK(c(i, j) == doctest::Approx(f.correlation(i, j)).epsilon(0.03).scale(1));
        CHECK(std::abs(z.mean()) < 0.02);
    }

    TEST_CASE("equicorrelated blocks, with a short last block")
    {
        CovarianceSpec spec;
        spec.kind = CovarianceKind::EquiBlock;
        spec.p = 8;
        spec.block_size = 3;
        RandomStream rng(1);
        const auto f = covariance_factor(spec, rng);
        CHECK(f.blocks().size() == 3);
        CHECK(f.blocks().back().rows() == 2);
        CHECK(f.correlation(0, 2) == 0.5);
        CHECK(f.correlation(2, 3) == 0.0);
        CHECK(f.correlation(6, 7) == 0.5);
        RandomStream draw(4);
        const auto c = sample_correlation(sample_design(f, 40000, draw));
        CHECK(c(0, 1) == doctest::Approx(0.5).epsilon(0.03).scale(1));
        CHECK(std::abs(c(1, 4)) < 0.03);
    }

    TEST_CASE("eigen-spread blocks are valid correlation matrices")
    {
        RandomStream rng(6);
        const auto b = eigen_block_correlation(50, 1.0, 50.0, rng);
        CHECK((b - b.transpose()).norm() < 1e-12);
        CHECK((b.diagonal().array() - 1.0).abs().maxCoeff() < 1e-12);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b);
        CHECK(es.eigenvalues().minCoeff() > 0.0);
        CHECK(es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff() > 5.0);

        const auto f1 = make_factor(CovarianceKind::EigenBlock, 120, 9);
        const auto f2 = make_factor(CovarianceKind::EigenBlock, 120, 9);
        CHECK(f1.blocks().size() == 3);
        CHECK(f1.submatrix(SupportSet::iota(120)) == f2.submatrix(SupportSet::iota(120)));
    }

    TEST_CASE("noiseless replicate: y is exactly the mean response")
    {
        const auto sched = divergence_schedule(100, 1);
        const auto f = make_factor(CovarianceKind::PowerDecay, sched.p);
        RandomStream rng(10);
        const auto d = generate_replicate(sched, f, BetaSpec{}, 0.0, rng);
        CHECK(d.x.rows() == 100);
        CHECK(d.x.cols() == 150);
        CHECK(d.true_support.size() == 4);
        CHECK((d.y - d.mean_response()).norm() == 0.0);
        for (index_t j = 0; j < 150; ++j) CHECK((d.true_beta(j) != 0.0) == d.true_support.contains(j));
    }

    TEST_CASE("replicates are reproducible and fixed coefficients are honored")
    {
        const auto sched = divergence_schedule(100, 2);
        const auto f = make_factor(CovarianceKind::EquiBlock, sched.p);
        RandomStream a(5), b(5);
        const auto d1 = generate_replicate(sched, f, BetaSpec{}, 0.5, a);
        const auto d2 = generate_replicate(sched, f, BetaSpec{}, 0.5, b);
        CHECK(d1.x == d2.x);
        CHECK(d1.y == d2.y);

        const Eigen::VectorXd fixed = Eigen::VectorXd::LinSpaced(sched.p0, 1, 2);
        RandomStream c(6);
        const auto d3 = generate_replicate(sched, f, BetaSpec{}, 0.5, c, SupportPlacement::First, &fixed);
        CHECK(d3.true_beta.head(sched.p0) == fixed);
        CHECK_THROWS_AS(generate_replicate(sched, f, BetaSpec{}, -1.0, c), InvalidArgument);
    }
}

#pragma once
#include <Eigen/Core>
#include <ebicsel/random.hpp>
#include <ebicsel/types.hpp>
#include <cstdint>
#include <string>
#include <vector>

namespace ebicsel {

/// Correlation families for the simulated covariates.
enum class CovarianceKind
{
    PowerDecay, // ρ^{|i-j|}
    EquiBlock,  // diagonal blocks, equal within-block correlation ρ
    EigenBlock, // diagonal blocks with spectrum spread over (eig_min, eig_max), rescaled to unit diagonal
};

std::string to_string(CovarianceKind kind);
/// Accepts I/II/III, power/equi/eigen, and the enumerator names.
CovarianceKind parse_covariance_kind(const std::string& text);

struct CovarianceSpec
{
    CovarianceKind kind = CovarianceKind::PowerDecay;
    index_t p = 1;
    double rho = 0.5;
    index_t block_size = 50;
    double eig_min = 1.0;
    double eig_max = 50.0;

    void validate() const;
};

/**
 * Realized covariance of the covariates, held as lower Cholesky factors of
 * its diagonal blocks (or just ρ for PowerDecay, sampled by AR(1) recursion).
 */
class CovarianceFactor
{
public:
    const CovarianceSpec& spec() const { return spec_; }
    index_t dim() const { return spec_.p; }

    /// Implied correlation entry Σ(i, j).
    double correlation(index_t i, index_t j) const;

    /// Σ restricted to the rows/columns in s.
    Eigen::MatrixXd submatrix(const SupportSet& s) const;

    /// Block correlation matrices (empty for PowerDecay).
    const std::vector<Eigen::MatrixXd>& blocks() const { return blocks_; }
    const std::vector<Eigen::MatrixXd>& block_factors() const { return factors_; }

private:
    friend CovarianceFactor covariance_factor(const CovarianceSpec&, RandomStream&);

    CovarianceSpec spec_;
    std::vector<Eigen::MatrixXd> blocks_;
    std::vector<Eigen::MatrixXd> factors_;
};

/// Builds the sampling factor. `rng` is consumed only for EigenBlock.
CovarianceFactor covariance_factor(const CovarianceSpec& spec, RandomStream& rng);

/// Random b×b correlation matrix: Q diag(spectrum) Qᵀ with Haar Q, rescaled to unit diagonal.
Eigen::MatrixXd eigen_block_correlation(index_t b, double eig_min, double eig_max, RandomStream& rng);

/// n i.i.d. rows, each N(0, Σ).
Eigen::MatrixXd sample_design(const CovarianceFactor& factor, index_t n, RandomStream& rng);

struct BetaSpec
{
    double n_ref = 100;
    double sign_prob = 0.4;       // P(u = 1); u = 1 gives a negative coefficient
    double floor_exponent = 0.1625;
    double z_tail_point = 0.1;
    double z_tail_prob = 0.25;    // P(|z| >= z_tail_point)

    /// Lower bound on |β|: n_ref^{-floor_exponent}.
    double magnitude_floor() const;
    /// Standard deviation of z solving P(|z| >= z_tail_point) = z_tail_prob.
    double z_sd() const;
};

/// p0 draws of (-1)^u (n_ref^{-0.1625} + |z|).
Eigen::VectorXd sample_beta(const BetaSpec& spec, index_t p0, RandomStream& rng);

struct ScheduleEntry
{
    index_t n = 0;
    int c = 1;
    index_t p0 = 0;
    index_t p = 0;

    friend bool operator==(const ScheduleEntry&, const ScheduleEntry&) = default;
};

/// (n, p0, p) divergence pattern; tabulated values for n in {100, 200, 500, 1000}.
ScheduleEntry divergence_schedule(index_t n, int c);

enum class SupportPlacement { EvenlySpaced, First };

/// Positions of the p0 relevant features among p.
SupportSet place_support(index_t p, index_t p0, SupportPlacement placement);

inline constexpr std::uint64_t calibration_seed = 0x5eedca11b7a7e000ULL;
inline constexpr index_t calibration_draws = 100000;

/**
 * Noise variance giving heritability h:
 *   σ² = E(β*ᵀ Σ β*) (1 - h) / h,
 * with β* drawn from `beta_spec` on the fixed positions `support` and Σ the
 * corresponding submatrix of `reference`. The expectation is a Monte Carlo
 * average over `draws` coefficient vectors from a fixed internal seed.
 */
double calibrate_sigma2(double h,
                        const CovarianceFactor& reference,
                        const BetaSpec& beta_spec,
                        const SupportSet& support,
                        index_t draws = calibration_draws);

/// Monte Carlo E(β*ᵀ Σ β*) used by calibrate_sigma2.
double expected_signal_variance(const Eigen::MatrixXd& sigma_sub,
                                const BetaSpec& beta_spec,
                                index_t draws = calibration_draws,
                                std::uint64_t seed = calibration_seed);

struct Dataset
{
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
    SupportSet true_support;
    Eigen::VectorXd true_beta; // length p, zero off true_support
    double sigma2 = 0;

    Eigen::VectorXd mean_response() const { return x * true_beta; }
};

/**
 * One simulated dataset. Draw order on `rng`: design, then coefficients
 * (skipped when `fixed_beta` is supplied), then noise.
 */
Dataset generate_replicate(const ScheduleEntry& schedule,
                           const CovarianceFactor& factor,
                           const BetaSpec& beta_spec,
                           double sigma2,
                           RandomStream& rng,
                           SupportPlacement placement = SupportPlacement::EvenlySpaced,
                           const Eigen::VectorXd* fixed_beta = nullptr);

} // namespace ebicsel

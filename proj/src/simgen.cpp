#include <Eigen/Dense>
#include <ebicsel/error.hpp>
#include <ebicsel/simgen.hpp>
#include <ebicsel/special_functions.hpp>
#include <cmath>

namespace ebicsel {

std::string to_string(CovarianceKind kind)
{
    switch (kind) {
        case CovarianceKind::PowerDecay: return "I";
        case CovarianceKind::EquiBlock: return "II";
        case CovarianceKind::EigenBlock: return "III";
    }
    return "?";
}

CovarianceKind parse_covariance_kind(const std::string& text)
{
    if (text == "I" || text == "1" || text == "power" || text == "PowerDecay") return CovarianceKind::PowerDecay;
    if (text == "II" || text == "2" || text == "equi" || text == "EquiBlock") return CovarianceKind::EquiBlock;
    if (text == "III" || text == "3" || text == "eigen" || text == "EigenBlock") return CovarianceKind::EigenBlock;
    throw InvalidArgument("unknown correlation structure '" + text + "'");
}

void CovarianceSpec::validate() const
{
    if (p < 1) throw InvalidConfig("covariance: p must be positive");
    if (kind != CovarianceKind::EigenBlock && !(rho > 0.0 && rho < 1.0)) {
        throw InvalidConfig("covariance: rho must lie in (0, 1)");
    }
    if (kind != CovarianceKind::PowerDecay && block_size < 1) {
        throw InvalidConfig("covariance: block_size must be positive");
    }
    if (kind == CovarianceKind::EigenBlock && !(eig_min > 0.0 && eig_max >= eig_min)) {
        throw InvalidConfig("covariance: need 0 < eig_min <= eig_max");
    }
}

double CovarianceFactor::correlation(index_t i, index_t j) const
{
    if (i < 0 || j < 0 || i >= spec_.p || j >= spec_.p) throw InvalidArgument("correlation: index out of range");
    if (spec_.kind == CovarianceKind::PowerDecay) {
        return std::pow(spec_.rho, static_cast<double>(std::abs(i - j)));
    }
    const index_t bi = i / spec_.block_size;
    if (bi != j / spec_.block_size) return 0.0;
    const index_t off = bi * spec_.block_size;
    return blocks_[static_cast<size_t>(bi)](i - off, j - off);
}

Eigen::MatrixXd CovarianceFactor::submatrix(const SupportSet& s) const
{
    Eigen::MatrixXd out(s.size(), s.size());
    for (index_t a = 0; a < s.size(); ++a) {
        for (index_t b = 0; b < s.size(); ++b) out(a, b) = correlation(s[a], s[b]);
    }
    return out;
}

Eigen::MatrixXd eigen_block_correlation(index_t b, double eig_min, double eig_max, RandomStream& rng)
{
    if (b < 1) throw InvalidArgument("eigen_block_correlation: block size must be positive");
    if (b == 1) return Eigen::MatrixXd::Ones(1, 1);
    for (;;) {
        Eigen::MatrixXd g(b, b);
        for (index_t j = 0; j < b; ++j)
            for (index_t i = 0; i < b; ++i) g(i, j) = rng.normal();

        Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
        Eigen::MatrixXd q = qr.householderQ();
        for (index_t k = 0; k < b; ++k) {
            if (qr.matrixQR()(k, k) < 0) q.col(k) = -q.col(k);
        }

        Eigen::VectorXd spectrum(b);
        spectrum(0) = eig_min;
        spectrum(1) = eig_max;
        for (index_t k = 2; k < b; ++k) spectrum(k) = rng.uniform(eig_min, eig_max);

        const Eigen::MatrixXd a = q * spectrum.asDiagonal() * q.transpose();
        const Eigen::VectorXd d = a.diagonal().cwiseSqrt().cwiseInverse();
        Eigen::MatrixXd c = d.asDiagonal() * a * d.asDiagonal();
        c = 0.5 * (c + c.transpose());
        c.diagonal().setOnes();

        Eigen::LLT<Eigen::MatrixXd> llt(c);
        if (llt.info() == Eigen::Success) return c;
    }
}

CovarianceFactor covariance_factor(const CovarianceSpec& spec, RandomStream& rng)
{
    spec.validate();
    CovarianceFactor f;
    f.spec_ = spec;
    if (spec.kind == CovarianceKind::PowerDecay) return f;

    const index_t full = spec.p / spec.block_size;
    const index_t last = spec.p % spec.block_size;
    auto equi = [&](index_t b) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Constant(b, b, spec.rho);
        m.diagonal().setOnes();
        return m;
    };
    auto push = [&](Eigen::MatrixXd block) {
        Eigen::LLT<Eigen::MatrixXd> llt(block);
        if (llt.info() != Eigen::Success) throw InvalidConfig("covariance block is not positive definite");
        f.factors_.push_back(llt.matrixL());
        f.blocks_.push_back(std::move(block));
    };

    for (index_t k = 0; k < full + (last > 0 ? 1 : 0); ++k) {
        const index_t b = k < full ? spec.block_size : last;
        if (spec.kind == CovarianceKind::EquiBlock) {
            // All full-size blocks are identical.
            if (k > 0 && b == spec.block_size) {
                f.blocks_.push_back(f.blocks_.front());
                f.factors_.push_back(f.factors_.front());
            } else {
                push(equi(b));
            }
        } else {
            push(eigen_block_correlation(b, spec.eig_min, spec.eig_max, rng));
        }
    }
    return f;
}

Eigen::MatrixXd sample_design(const CovarianceFactor& factor, index_t n, RandomStream& rng)
{
    if (n < 1) throw InvalidArgument("sample_design: n must be positive");
    const index_t p = factor.dim();
    Eigen::MatrixXd z(n, p);
    for (index_t j = 0; j < p; ++j)
        for (index_t i = 0; i < n; ++i) z(i, j) = rng.normal();

    const auto& spec = factor.spec();
    if (spec.kind == CovarianceKind::PowerDecay) {
        const double s = std::sqrt(1.0 - spec.rho * spec.rho);
        for (index_t j = 1; j < p; ++j) z.col(j) = spec.rho * z.col(j - 1) + s * z.col(j);
        return z;
    }
    index_t off = 0;
    for (const auto& l : factor.block_factors()) {
        const index_t b = l.rows();
        z.middleCols(off, b) = (z.middleCols(off, b) * l.transpose()).eval();
        off += b;
    }
    return z;
}

double BetaSpec::magnitude_floor() const
{
    return std::pow(n_ref, -floor_exponent);
}

double BetaSpec::z_sd() const
{
    if (!(z_tail_prob > 0.0 && z_tail_prob < 1.0)) throw InvalidConfig("beta: z tail probability must lie in (0, 1)");
    return z_tail_point / special::normal_quantile(1.0 - 0.5 * z_tail_prob);
}

Eigen::VectorXd sample_beta(const BetaSpec& spec, index_t p0, RandomStream& rng)
{
    if (p0 < 1) throw InvalidArgument("sample_beta: p0 must be positive");
    const double floor = spec.magnitude_floor();
    const double sd = spec.z_sd();
    Eigen::VectorXd beta(p0);
    for (index_t k = 0; k < p0; ++k) {
        const bool negative = rng.bernoulli(spec.sign_prob);
        const double mag = floor + std::abs(sd * rng.normal());
        beta(k) = negative ? -mag : mag;
    }
    return beta;
}

ScheduleEntry divergence_schedule(index_t n, int c)
{
    if (n < 2) throw InvalidArgument("divergence_schedule: n must be at least 2");
    if (c < 1) throw InvalidArgument("divergence_schedule: c must be positive");
    struct Row { index_t n, p0, p; };
    static constexpr Row table[] = {{100, 4, 150}, {200, 6, 595}, {500, 8, 6655}, {1000, 9, 74622}};
    for (const auto& row : table) {
        if (row.n == n) return {n, c, c * row.p0, row.p};
    }
    const double nd = static_cast<double>(n);
    const auto p0 = c * static_cast<index_t>(std::llround(std::pow(nd, 0.325)));
    const auto p = static_cast<index_t>(std::llround(std::exp(std::pow(nd, 0.35))));
    return {n, c, p0, p};
}

SupportSet place_support(index_t p, index_t p0, SupportPlacement placement)
{
    if (p0 < 0 || p0 > p) throw InvalidArgument("place_support: need 0 <= p0 <= p");
    if (placement == SupportPlacement::First) return SupportSet::iota(p0);
    SupportSet::container_t idx;
    idx.reserve(static_cast<size_t>(p0));
    for (index_t k = 0; k < p0; ++k) {
        // midpoint of the k-th of p0 equal slices of [0, p)
        idx.push_back((2 * k + 1) * p / (2 * p0));
    }
    return SupportSet(std::move(idx));
}

double expected_signal_variance(const Eigen::MatrixXd& sigma_sub,
                                const BetaSpec& beta_spec,
                                index_t draws,
                                std::uint64_t seed)
{
    if (draws < 1) throw InvalidArgument("expected_signal_variance: draws must be positive");
    RandomStream rng(seed);
    const index_t k = sigma_sub.rows();
    double acc = 0.0;
    for (index_t d = 0; d < draws; ++d) {
        const Eigen::VectorXd b = sample_beta(beta_spec, k, rng);
        acc += b.dot(sigma_sub * b);
    }
    return acc / static_cast<double>(draws);
}

double calibrate_sigma2(double h,
                        const CovarianceFactor& reference,
                        const BetaSpec& beta_spec,
                        const SupportSet& support,
                        index_t draws)
{
    if (!(h > 0.0 && h < 1.0)) throw InvalidConfig("heritability h must lie in (0, 1)");
    if (support.empty()) throw InvalidConfig("calibration support must be nonempty");
    const double q = expected_signal_variance(reference.submatrix(support), beta_spec, draws);
    return q * (1.0 - h) / h;
}

Dataset generate_replicate(const ScheduleEntry& schedule,
                           const CovarianceFactor& factor,
                           const BetaSpec& beta_spec,
                           double sigma2,
                           RandomStream& rng,
                           SupportPlacement placement,
                           const Eigen::VectorXd* fixed_beta)
{
    if (!(sigma2 >= 0.0)) throw InvalidArgument("generate_replicate: sigma2 must be nonnegative");
    if (factor.dim() != schedule.p) throw InvalidArgument("generate_replicate: covariance dimension differs from schedule p");

    Dataset d;
    d.sigma2 = sigma2;
    d.x = sample_design(factor, schedule.n, rng);
    d.true_support = place_support(schedule.p, schedule.p0, placement);

    Eigen::VectorXd b;
    if (fixed_beta) {
        if (fixed_beta->size() != schedule.p0) throw InvalidArgument("generate_replicate: fixed beta has wrong length");
        b = *fixed_beta;
    } else {
        b = sample_beta(beta_spec, schedule.p0, rng);
    }
    d.true_beta = Eigen::VectorXd::Zero(schedule.p);
    for (index_t k = 0; k < d.true_support.size(); ++k) d.true_beta(d.true_support[k]) = b(k);

    d.y = d.x * d.true_beta;
    const double sd = std::sqrt(sigma2);
    for (index_t i = 0; i < schedule.n; ++i) d.y(i) += sd * rng.normal();
    return d;
}

} // namespace ebicsel

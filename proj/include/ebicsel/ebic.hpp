#pragma once
#include <cstdint>
#include <string>

namespace ebicsel {

/**
 * How the EBIC index γ is chosen for a dataset.
 *
 * Fixed(γ) uses the same value everywhere. ScaledConsistent(C) resolves to
 * 1 - ln n / (C ln p), which lies above the consistency threshold
 * 1 - ln n / (2 ln p) whenever C > 2. Resolved values are clamped to [0, 1].
 */
class GammaPolicy
{
public:
    enum class Kind { Fixed, ScaledConsistent };

    static GammaPolicy fixed(double gamma);
    static GammaPolicy scaled_consistent(double divisor);

    Kind kind() const { return kind_; }
    double parameter() const { return parameter_; }

    double resolve(std::int64_t n, std::int64_t p) const;

    /// "fixed:<γ>" or "sc:<C>"; parse() accepts the same plus bic, sc, mbic.
    std::string to_string() const;
    static GammaPolicy parse(const std::string& text);

    friend bool operator==(const GammaPolicy&, const GammaPolicy&) = default;

private:
    GammaPolicy(Kind kind, double parameter) : kind_(kind), parameter_(parameter) {}

    Kind kind_ = Kind::Fixed;
    double parameter_ = 0.0;
};

/// ln C(p, j), accurate to ~1e-14 relative for p up to 1e15.
double log_binomial(std::int64_t p, std::int64_t j);

/**
 * n ln(rss / n) + s_size ln n + 2 γ ln C(p, s_size).
 * Throws DegenerateFit when rss <= 0.
 */
double ebic_score(double rss, std::int64_t n, std::int64_t p, std::int64_t s_size, double gamma);

/// 1 - ln n / (divisor ln p), clamped to [0, 1].
double gamma_sc(std::int64_t n, std::int64_t p, double divisor);

/// Lower bound on γ for selection consistency when ln p0 / ln p -> delta.
double gamma_threshold(std::int64_t n, std::int64_t p, double delta);

/// ln C(p, j) / (j ln p (1 - δ)) with δ = ln j / ln p.
double lemma1_ratio(std::int64_t p, std::int64_t j);

/// ⌈p^δ⌉, robust to pow() landing a hair above an exact integer.
std::int64_t ceil_power(std::int64_t p, double delta);

/// P(χ²_k >= m) as the regularized upper incomplete gamma Q(k/2, m/2).
double chi2_tail_exact(int k, double m);
double chi2_log_tail_exact(int k, double m);

/// Leading asymptotic term (m/2)^{k/2-1} e^{-m/2} / Γ(k/2).
double chi2_tail_approx(int k, double m);
double chi2_log_tail_approx(int k, double m);

/// approx / exact, evaluated in log space (finite even when both underflow).
double chi2_tail_ratio(int k, double m);

} // namespace ebicsel

#include <ebicsel/ebic.hpp>
#include <ebicsel/error.hpp>
#include <ebicsel/special_functions.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace ebicsel {
namespace {

constexpr double half_log_two_pi = 0.91893853320467274178;

// ln n! - [(n + 1/2) ln n - n + ln sqrt(2π)]
double stirling_error(double n)
{
    if (n <= 15.0) {
        return std::lgamma(n + 1.0) - (n + 0.5) * std::log(n) + n - half_log_two_pi;
    }
    const double inv = 1.0 / n;
    const double inv2 = inv * inv;
    return inv * (1.0 / 12 - inv2 * (1.0 / 360 - inv2 * (1.0 / 1260 - inv2 * (1.0 / 1680 - inv2 / 1188))));
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

} // namespace

GammaPolicy GammaPolicy::fixed(double gamma)
{
    if (!(gamma >= 0.0)) throw InvalidArgument("fixed gamma must be nonnegative");
    return {Kind::Fixed, gamma};
}

GammaPolicy GammaPolicy::scaled_consistent(double divisor)
{
    if (!(divisor > 2.0)) throw InvalidArgument("scaled-consistent divisor must exceed 2");
    return {Kind::ScaledConsistent, divisor};
}

double GammaPolicy::resolve(std::int64_t n, std::int64_t p) const
{
    if (kind_ == Kind::Fixed) return clamp01(parameter_);
    return gamma_sc(n, p, parameter_);
}

std::string GammaPolicy::to_string() const
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s:%.17g", kind_ == Kind::Fixed ? "fixed" : "sc", parameter_);
    return buf;
}

GammaPolicy GammaPolicy::parse(const std::string& text)
{
    if (text == "bic") return fixed(0.0);
    if (text == "mbic") return fixed(1.0);
    if (text == "sc") return scaled_consistent(4.0);
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw InvalidArgument("unrecognized gamma policy '" + text + "'");
    const auto head = text.substr(0, colon);
    double value;
    try {
        size_t used = 0;
        value = std::stod(text.substr(colon + 1), &used);
        if (used != text.size() - colon - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
        throw InvalidArgument("bad number in gamma policy '" + text + "'");
    }
    if (head == "fixed") return fixed(value);
    if (head == "sc") return scaled_consistent(value);
    throw InvalidArgument("unrecognized gamma policy '" + text + "'");
}

double log_binomial(std::int64_t p, std::int64_t j)
{
    if (p < 0 || j < 0 || j > p) throw InvalidArgument("log_binomial: need 0 <= j <= p");
    const std::int64_t k = std::min(j, p - j);
    if (k == 0) return 0.0;

    const double pd = static_cast<double>(p);
    if (k <= 30) {
        double acc = 0.0;
        for (std::int64_t i = 0; i < k; ++i) {
            acc += std::log(pd - static_cast<double>(i)) - std::log(static_cast<double>(i + 1));
        }
        return acc;
    }

    // Stirling form with the (p + 1/2) ln p - (p - k + 1/2) ln(p - k) difference
    // rewritten through log1p so nothing of order p ln p is cancelled.
    const double kd = static_cast<double>(k);
    const double rest = pd - kd;
    return kd * std::log(pd) - (rest + 0.5) * std::log1p(-kd / pd) - (kd + 0.5) * std::log(kd) -
           half_log_two_pi + stirling_error(pd) - stirling_error(kd) - stirling_error(rest);
}

double ebic_score(double rss, std::int64_t n, std::int64_t p, std::int64_t s_size, double gamma)
{
    if (!(rss > 0.0)) throw DegenerateFit("ebic_score: residual sum of squares must be positive");
    if (n < 1 || p < 1) throw InvalidArgument("ebic_score: n and p must be positive");
    if (s_size < 0 || s_size > p) throw InvalidArgument("ebic_score: support size outside [0, p]");
    if (!(gamma >= 0.0)) throw InvalidArgument("ebic_score: gamma must be nonnegative");
    const double nd = static_cast<double>(n);
    double score = nd * std::log(rss / nd) + static_cast<double>(s_size) * std::log(nd);
    if (gamma != 0.0) score += 2.0 * gamma * log_binomial(p, s_size);
    return score;
}

double gamma_sc(std::int64_t n, std::int64_t p, double divisor)
{
    if (n < 2 || p < 2) throw InvalidArgument("gamma_sc: need n >= 2 and p >= 2");
    return clamp01(1.0 - std::log(static_cast<double>(n)) /
                             (divisor * std::log(static_cast<double>(p))));
}

double gamma_threshold(std::int64_t n, std::int64_t p, double delta)
{
    if (n < 2 || p < 2) throw InvalidArgument("gamma_threshold: need n >= 2 and p >= 2");
    if (!(delta >= 0.0 && delta < 1.0)) throw InvalidArgument("gamma_threshold: delta must lie in [0, 1)");
    const double ratio = std::log(static_cast<double>(n)) / std::log(static_cast<double>(p));
    return (1.0 + delta) / (1.0 - delta) - ratio / (2.0 * (1.0 - delta));
}

double lemma1_ratio(std::int64_t p, std::int64_t j)
{
    if (j < 1 || j >= p) throw InvalidArgument("lemma1_ratio: need 1 <= j < p");
    const double log_p = std::log(static_cast<double>(p));
    const double log_j = std::log(static_cast<double>(j));
    // j ln p (1 - ln j / ln p) == j (ln p - ln j)
    return log_binomial(p, j) / (static_cast<double>(j) * (log_p - log_j));
}

std::int64_t ceil_power(std::int64_t p, double delta)
{
    const double r = std::pow(static_cast<double>(p), delta);
    const double nearest = std::round(r);
    if (std::abs(r - nearest) <= 1e-9 * std::max(1.0, r)) return static_cast<std::int64_t>(nearest);
    return static_cast<std::int64_t>(std::ceil(r));
}

double chi2_log_tail_exact(int k, double m)
{
    if (k < 1) throw InvalidArgument("chi2 tail: k must be positive");
    if (!(m > 0.0)) throw InvalidArgument("chi2 tail: m must be positive");
    return special::log_gamma_q(0.5 * k, 0.5 * m);
}

double chi2_tail_exact(int k, double m) { return std::exp(chi2_log_tail_exact(k, m)); }

double chi2_log_tail_approx(int k, double m)
{
    if (k < 1) throw InvalidArgument("chi2 tail: k must be positive");
    if (!(m > 0.0)) throw InvalidArgument("chi2 tail: m must be positive");
    const double half_k = 0.5 * k;
    const double half_m = 0.5 * m;
    return (half_k - 1.0) * std::log(half_m) - half_m - std::lgamma(half_k);
}

double chi2_tail_approx(int k, double m) { return std::exp(chi2_log_tail_approx(k, m)); }

double chi2_tail_ratio(int k, double m)
{
    return std::exp(chi2_log_tail_approx(k, m) - chi2_log_tail_exact(k, m));
}

} // namespace ebicsel

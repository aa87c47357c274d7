#include <ebicsel/linmodel.hpp>
#include <ebicsel/pipeline.hpp>
#include <cmath>
#include <set>

namespace ebicsel {

index_t PipelineConfig::resolved_screen_target(index_t n) const
{
    return screen_target > 0 ? screen_target : n / 2;
}

index_t PipelineConfig::sis_budget(index_t n) const
{
    const double b = std::ceil(std::pow(static_cast<double>(n), sis_budget_exponent) - 1e-9);
    return std::max<index_t>(1, static_cast<index_t>(b));
}

void PipelineConfig::validate(index_t n) const
{
    const index_t target = resolved_screen_target(n);
    if (target < 1 || target >= n) throw InvalidConfig("screen_target must lie in [1, n)");
    if (sis_budget(n) < target) throw InvalidConfig("SIS budget must be at least screen_target");
    if (penalty.kind == PenaltySpec::Kind::Scad && !(penalty.a > 2.0)) {
        throw InvalidConfig("SCAD a must exceed 2");
    }
    if (!(rss_floor_fraction > 0.0)) throw InvalidConfig("rss_floor_fraction must be positive");
}

Eigen::VectorXd marginal_correlations(const Eigen::Ref<const Eigen::MatrixXd>& x,
                                      const Eigen::Ref<const Eigen::VectorXd>& y)
{
    if (x.rows() != y.rows()) throw InvalidArgument("marginal_correlations: row counts differ");
    const double n = static_cast<double>(x.rows());
    const Eigen::VectorXd yc = y.array() - y.mean();
    const double y_norm = yc.norm();
    const Eigen::VectorXd cross = x.transpose() * yc;
    const Eigen::VectorXd means = x.colwise().mean().transpose();
    const Eigen::VectorXd sq = x.colwise().squaredNorm().transpose();

    Eigen::VectorXd corr(x.cols());
    for (index_t j = 0; j < x.cols(); ++j) {
        const double ss = sq(j) - n * means(j) * means(j);
        const bool flat = !(ss > 1e-24 * std::max(1.0, sq(j)));
        corr(j) = (flat || y_norm == 0.0) ? 0.0 : cross(j) / (std::sqrt(ss) * y_norm);
    }
    return corr;
}

SupportSet sis_screen(const Eigen::Ref<const Eigen::MatrixXd>& x,
                      const Eigen::Ref<const Eigen::VectorXd>& y,
                      index_t budget)
{
    if (budget < 1) throw InvalidArgument("sis_screen: budget must be positive");
    const index_t p = x.cols();
    if (budget >= p) return SupportSet::iota(p);
    const Eigen::VectorXd corr = marginal_correlations(x, y).cwiseAbs();
    std::vector<index_t> order(static_cast<size_t>(p));
    for (index_t j = 0; j < p; ++j) order[static_cast<size_t>(j)] = j;
    std::stable_sort(order.begin(), order.end(),
                     [&](index_t a, index_t b) { return corr(a) > corr(b); });
    order.resize(static_cast<size_t>(budget));
    return SupportSet::from_unsorted(std::move(order));
}

SupportSet lasso_screen(const Eigen::Ref<const Eigen::MatrixXd>& x,
                        const Eigen::Ref<const Eigen::VectorXd>& y,
                        index_t target,
                        const PathOptions& path)
{
    if (target < 1) throw InvalidArgument("lasso_screen: target must be positive");
    if (target >= x.rows()) throw InvalidArgument("lasso_screen: target must be below n");
    if (target >= x.cols()) return SupportSet::iota(x.cols());

    const auto sd = standardize(x, y);
    PathOptions opts = path;
    opts.max_support = -1;
    opts.stop_at_size = target;
    const auto res = lambda_path(sd.x, sd.y, PenaltySpec::lasso(), opts);

    // The last point is either the first to reach the target or the end of the grid.
    size_t pick = 0;
    for (size_t i = 0; i < res.size(); ++i) {
        if (res.supports[i].size() >= res.supports[pick].size()) pick = i;
        if (res.supports[i].size() >= target) {
            pick = i;
            break;
        }
    }
    const auto& coef = res.coefficients[pick];
    if (res.supports[pick].size() <= target) return res.supports[pick];

    std::vector<std::pair<double, index_t>> mags;
    for (Eigen::SparseVector<double>::InnerIterator it(coef); it; ++it) {
        mags.emplace_back(std::abs(it.value()), it.index());
    }
    std::stable_sort(mags.begin(), mags.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    SupportSet::container_t keep;
    for (index_t k = 0; k < target; ++k) keep.push_back(mags[static_cast<size_t>(k)].second);
    return SupportSet::from_unsorted(std::move(keep));
}

CandidateSet build_candidates(const Eigen::Ref<const Eigen::MatrixXd>& x,
                              const Eigen::Ref<const Eigen::VectorXd>& y,
                              const SupportSet& screened,
                              index_t p_original,
                              const PipelineConfig& config)
{
    const index_t n = x.rows();
    if (y.rows() != n) throw InvalidArgument("build_candidates: row counts differ");
    if (screened.size() >= n) throw InvalidArgument("build_candidates: screened set must be smaller than n");
    if (!screened.empty() && screened[screened.size() - 1] >= x.cols()) {
        throw InvalidArgument("build_candidates: screened index out of range");
    }
    if (p_original < x.cols()) throw InvalidArgument("build_candidates: p_original below column count");

    CandidateSet out;
    out.n = n;
    out.p_original = p_original;
    out.screened = screened;

    const auto sd = standardize(columns(x, screened), y);
    out.y_norm2 = sd.y.squaredNorm();

    PathOptions opts = config.path;
    opts.max_support = std::min(config.resolved_screen_target(n), n - 1);
    opts.stop_at_size = -1;
    const auto path = lambda_path(sd.x, sd.y, config.penalty, opts);

    std::set<SupportSet::container_t> seen;
    for (size_t i = 0; i < path.size(); ++i) {
        const auto& local = path.supports[i];
        if (!seen.insert(local.indices()).second) continue;
        SupportSet original = local.lift(screened);
        try {
            const auto fit = ols_fit(sd.x, sd.y, local);
            out.candidates.push_back({path.lambdas[i], std::move(original), fit.rss});
        } catch (const RankDeficient&) {
            out.skipped.push_back({path.lambdas[i], std::move(original), "rank deficient"});
        }
    }
    return out;
}

SelectionResult choose_by_ebic(const CandidateSet& cands, double gamma, double rss_floor_fraction)
{
    SelectionResult res;
    res.gamma = gamma;
    res.screened = cands.screened;
    res.skipped = cands.skipped;

    const double floor = rss_floor_fraction * cands.y_norm2;
    const Candidate* best = nullptr;
    for (const auto& c : cands.candidates) {
        double score;
        try {
            score = ebic_score(std::max(c.rss, floor), cands.n, cands.p_original, c.support.size(), gamma);
        } catch (const DegenerateFit&) {
            res.skipped.push_back({c.lambda, c.support, "zero residual"});
            continue;
        }
        res.per_lambda_scores.push_back({c.lambda, c.support.size(), score});
        const bool better = !best || score < res.ebic_star ||
                            (score == res.ebic_star && c.support.size() < best->support.size());
        if (better) {
            best = &c;
            res.ebic_star = score;
        }
    }
    if (!best) throw EmptyPath("no candidate support could be scored");
    res.selected = best->support;
    res.lambda_star = best->lambda;
    return res;
}

SelectionResult select_by_ebic(const Eigen::Ref<const Eigen::MatrixXd>& x,
                               const Eigen::Ref<const Eigen::VectorXd>& y,
                               const SupportSet& screened,
                               index_t p_original,
                               const PipelineConfig& config)
{
    const auto cands = build_candidates(x, y, screened, p_original, config);
    const double gamma = config.gamma.resolve(x.rows(), p_original);
    return choose_by_ebic(cands, gamma, config.rss_floor_fraction);
}

SupportSet screen_features(const Eigen::Ref<const Eigen::MatrixXd>& x,
                           const Eigen::Ref<const Eigen::VectorXd>& y,
                           const PipelineConfig& config)
{
    const index_t n = x.rows();
    config.validate(n);
    const SupportSet sis = sis_screen(x, y, config.sis_budget(n));
    const index_t target = config.resolved_screen_target(n);
    if (sis.size() <= target) return sis;
    if (sis.size() == x.cols()) return lasso_screen(x, y, target, config.path);
    return lasso_screen(columns(x, sis), y, target, config.path).lift(sis);
}

std::vector<SelectionResult> run_two_stage_multi(const Eigen::Ref<const Eigen::MatrixXd>& x,
                                                 const Eigen::Ref<const Eigen::VectorXd>& y,
                                                 const PipelineConfig& config,
                                                 const std::vector<GammaPolicy>& gammas)
{
    const SupportSet screened = screen_features(x, y, config);
    const auto cands = build_candidates(x, y, screened, x.cols(), config);
    std::vector<SelectionResult> out;
    out.reserve(gammas.size());
    for (const auto& g : gammas) {
        out.push_back(choose_by_ebic(cands, g.resolve(x.rows(), x.cols()), config.rss_floor_fraction));
    }
    return out;
}

SelectionResult run_two_stage(const Eigen::Ref<const Eigen::MatrixXd>& x,
                              const Eigen::Ref<const Eigen::VectorXd>& y,
                              const PipelineConfig& config)
{
    return std::move(run_two_stage_multi(x, y, config, {config.gamma}).front());
}

SelectionResult run_two_stage(const Dataset& dataset, const PipelineConfig& config)
{
    return run_two_stage(dataset.x, dataset.y, config);
}

DiscoveryRates pdr_fdr(const SupportSet& selected, const SupportSet& truth)
{
    if (truth.empty()) throw InvalidArgument("pdr_fdr: true support must be nonempty");
    const auto hits = static_cast<double>(intersection_size(selected, truth));
    DiscoveryRates r;
    r.pdr = hits / static_cast<double>(truth.size());
    r.fdr = selected.empty() ? 0.0 : (static_cast<double>(selected.size()) - hits) / static_cast<double>(selected.size());
    return r;
}

} // namespace ebicsel

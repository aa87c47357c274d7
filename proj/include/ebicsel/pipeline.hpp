#pragma once
#include <Eigen/Core>
#include <ebicsel/ebic.hpp>
#include <ebicsel/simgen.hpp>
#include <ebicsel/solvers.hpp>
#include <ebicsel/types.hpp>
#include <string>
#include <vector>

namespace ebicsel {

struct PipelineConfig
{
    /// SIS keeps ⌈n^exponent⌉ features.
    double sis_budget_exponent = 1.5;
    /// Lasso screening target and cap on candidate model size; <= 0 means ⌊0.5 n⌋.
    index_t screen_target = 0;
    GammaPolicy gamma = GammaPolicy::scaled_consistent(4.0);
    PenaltySpec penalty = PenaltySpec::scad(3.7);
    PathOptions path;
    /// rss values below this fraction of ||y||² are scored at the fraction.
    double rss_floor_fraction = 1e-12;

    index_t resolved_screen_target(index_t n) const;
    index_t sis_budget(index_t n) const;
    void validate(index_t n) const;
};

/// A distinct support visited by the selection path, refitted without penalty.
struct Candidate
{
    double lambda = 0;   // largest λ on the path producing this support
    SupportSet support;  // original-index space
    double rss = 0;      // of the centered refit, before flooring
};

struct SkippedCandidate
{
    double lambda = 0;
    SupportSet support;
    std::string reason;
};

struct CandidateSet
{
    index_t n = 0;
    index_t p_original = 0;
    double y_norm2 = 0;   // ||y - ȳ||²
    SupportSet screened;
    std::vector<Candidate> candidates;
    std::vector<SkippedCandidate> skipped;
};

struct LambdaScore
{
    double lambda = 0;
    index_t support_size = 0;
    double ebic = 0;
};

struct SelectionResult
{
    SupportSet selected;
    double lambda_star = 0;
    double ebic_star = 0;
    double gamma = 0;
    SupportSet screened;
    std::vector<LambdaScore> per_lambda_scores;
    std::vector<SkippedCandidate> skipped;
};

/// Top-`budget` features by absolute marginal correlation with y (ties: lower index first).
SupportSet sis_screen(const Eigen::Ref<const Eigen::MatrixXd>& x,
                      const Eigen::Ref<const Eigen::VectorXd>& y,
                      index_t budget);

/// Marginal correlations used by sis_screen; zero-variance columns give 0.
Eigen::VectorXd marginal_correlations(const Eigen::Ref<const Eigen::MatrixXd>& x,
                                      const Eigen::Ref<const Eigen::VectorXd>& y);

/**
 * Lasso reduction to at most `target` columns (indices into x's columns).
 * Takes the first λ on a descending path whose support reaches `target`,
 * keeping the `target` largest |coefficients|; if the path never gets there,
 * the largest support reached is returned.
 */
SupportSet lasso_screen(const Eigen::Ref<const Eigen::MatrixXd>& x,
                        const Eigen::Ref<const Eigen::VectorXd>& y,
                        index_t target,
                        const PathOptions& path = {});

/**
 * SCAD path on X(screened), truncated at the configured candidate cap; each
 * distinct support is refitted by OLS on centered data. Supports that are
 * rank deficient are recorded as skipped.
 */
CandidateSet build_candidates(const Eigen::Ref<const Eigen::MatrixXd>& x,
                              const Eigen::Ref<const Eigen::VectorXd>& y,
                              const SupportSet& screened,
                              index_t p_original,
                              const PipelineConfig& config);

/// Minimum-EBIC candidate for a given γ (ties: smaller support, then larger λ).
SelectionResult choose_by_ebic(const CandidateSet& cands, double gamma, double rss_floor_fraction = 1e-12);

/// build_candidates followed by choose_by_ebic with the config's γ policy.
SelectionResult select_by_ebic(const Eigen::Ref<const Eigen::MatrixXd>& x,
                               const Eigen::Ref<const Eigen::VectorXd>& y,
                               const SupportSet& screened,
                               index_t p_original,
                               const PipelineConfig& config);

/// SIS then Lasso screening; returns the screened set in original indices.
SupportSet screen_features(const Eigen::Ref<const Eigen::MatrixXd>& x,
                           const Eigen::Ref<const Eigen::VectorXd>& y,
                           const PipelineConfig& config);

SelectionResult run_two_stage(const Eigen::Ref<const Eigen::MatrixXd>& x,
                              const Eigen::Ref<const Eigen::VectorXd>& y,
                              const PipelineConfig& config);
SelectionResult run_two_stage(const Dataset& dataset, const PipelineConfig& config);

/// One screening + path pass scored under several γ values.
std::vector<SelectionResult> run_two_stage_multi(const Eigen::Ref<const Eigen::MatrixXd>& x,
                                                 const Eigen::Ref<const Eigen::VectorXd>& y,
                                                 const PipelineConfig& config,
                                                 const std::vector<GammaPolicy>& gammas);

struct DiscoveryRates
{
    double pdr = 0;
    double fdr = 0;
};

/// PDR = |sel ∩ truth| / |truth|; FDR = |sel \ truth| / |sel|, taken as 0 for an empty selection.
DiscoveryRates pdr_fdr(const SupportSet& selected, const SupportSet& truth);

} // namespace ebicsel

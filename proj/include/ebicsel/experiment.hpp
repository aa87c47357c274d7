#pragma once
#include <ebicsel/ebic.hpp>
#include <ebicsel/pipeline.hpp>
#include <ebicsel/simgen.hpp>
#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace ebicsel {

struct LabeledGamma
{
    std::string label;
    GammaPolicy policy;
};

/// bic = fixed 0, sc = scaled-consistent with C = 4, mbic = fixed 1.
std::vector<LabeledGamma> default_gamma_policies();

struct StudyConfig
{
    std::vector<CovarianceKind> structures{CovarianceKind::PowerDecay};
    std::vector<int> c_values{1};
    std::vector<index_t> n_values{100, 200};
    std::vector<double> h_values{0.4, 0.6, 0.8};
    std::vector<LabeledGamma> gamma_policies = default_gamma_policies();
    index_t replicates = 50;
    std::uint64_t master_seed = 20260101;
    unsigned workers = 0; // 0: hardware concurrency

    bool fixed_beta = false; // one coefficient draw per setting instead of per replicate
    SupportPlacement placement = SupportPlacement::EvenlySpaced;
    double rho = 0.5;
    index_t block_size = 50;
    double eig_min = 1.0;
    double eig_max = 50.0;
    BetaSpec beta;               // n_ref is replaced by each setting's n
    index_t calibration_n = 100; // σ² is fixed from this sample size's schedule
    PipelineConfig pipeline;

    /// Desk profile: Structure I, c = 1, n in {100, 200}, all h, 50 replicates.
    static StudyConfig desk();
    /// Full profile: all structures, c in {1, 2}, n in {100, 200, 500, 1000}, 200 replicates.
    static StudyConfig full();

    void validate() const;
};

struct SettingKey
{
    CovarianceKind structure = CovarianceKind::PowerDecay;
    int c = 1;
    index_t n = 100;
    double h = 0.8;

    friend auto operator<=>(const SettingKey&, const SettingKey&) = default;
    friend bool operator==(const SettingKey&, const SettingKey&) = default;
};

/// Stable identifier of a setting, independent of enumeration order.
std::uint64_t setting_id(const SettingKey& key);

struct ReplicateRecord
{
    SettingKey setting;
    std::string gamma_label;
    index_t replicate = 0;
    double pdr = 0;
    double fdr = 0;
    index_t selected_size = 0;
    double lambda_star = 0;
    std::string status = "ok";

    bool ok() const { return status == "ok"; }
};

struct SettingSummary
{
    SettingKey setting;
    std::string gamma_label;
    double pdr_mean = 0;
    double pdr_sd = 0;
    double fdr_mean = 0;
    double fdr_sd = 0;
    index_t replicates_completed = 0;
    index_t failures = 0;
    bool flagged = false; // single replicate, or more than 10% failures
};

struct StudyResult
{
    std::vector<ReplicateRecord> records;
    std::vector<SettingSummary> summaries;
};

/// Everything a setting's replicates share: covariance, noise level, optional fixed β.
struct SettingContext
{
    SettingKey key;
    ScheduleEntry schedule;
    CovarianceFactor factor;
    BetaSpec beta;
    double sigma2 = 0;
    Eigen::VectorXd fixed_beta; // empty unless StudyConfig::fixed_beta
};

SettingContext prepare_setting(const StudyConfig& config, const SettingKey& key);

/// Dataset for one replicate of a prepared setting.
Dataset replicate_dataset(const StudyConfig& config, const SettingContext& ctx, index_t replicate);

/// All γ policies on every replicate of one setting, ordered by (γ policy, replicate).
std::vector<ReplicateRecord> run_setting(const StudyConfig& config, const SettingKey& key);

using ProgressFn = std::function<void(const SettingKey&)>;

/// Runs every setting; summaries follow (structure, c, n, h, γ) enumeration order.
StudyResult run_study(const StudyConfig& config, const ProgressFn& progress = {});

/// Means and (R-1)-denominator standard deviations over successful replicates.
std::vector<SettingSummary> aggregate(const std::vector<ReplicateRecord>& records);

} // namespace ebicsel

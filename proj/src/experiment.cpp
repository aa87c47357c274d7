#include <ebicsel/error.hpp>
#include <ebicsel/experiment.hpp>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <thread>

namespace ebicsel {
namespace {

// Reserved replicate indices for per-setting draws.
constexpr std::uint64_t factor_stream = ~std::uint64_t{0};
constexpr std::uint64_t fixed_beta_stream = ~std::uint64_t{0} - 1;

std::uint64_t structure_code(CovarianceKind k)
{
    return static_cast<std::uint64_t>(k) + 1;
}

// Covariance realizations depend only on the structure and the dimension,
// so the calibration reference at n = 100 is the n = 100 setting's matrix.
std::uint64_t covariance_id(CovarianceKind k, index_t p)
{
    return mix64(mix64(0xc0fa1a7ceULL ^ structure_code(k)) ^ static_cast<std::uint64_t>(p));
}

CovarianceSpec covariance_spec(const StudyConfig& cfg, CovarianceKind kind, index_t p)
{
    CovarianceSpec s;
    s.kind = kind;
    s.p = p;
    s.rho = cfg.rho;
    s.block_size = cfg.block_size;
    s.eig_min = cfg.eig_min;
    s.eig_max = cfg.eig_max;
    return s;
}

CovarianceFactor realize_covariance(const StudyConfig& cfg, CovarianceKind kind, index_t p)
{
    auto rng = derive_stream(cfg.master_seed, covariance_id(kind, p), factor_stream);
    return covariance_factor(covariance_spec(cfg, kind, p), rng);
}

struct MeanSd
{
    double mean = 0;
    double sd = 0;
};

MeanSd mean_sd(const std::vector<double>& v)
{
    MeanSd r;
    if (v.empty()) return r;
    double sum = 0;
    for (double x : v) sum += x;
    r.mean = sum / static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0;
        for (double x : v) ss += (x - r.mean) * (x - r.mean);
        r.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
    }
    return r;
}

} // namespace

std::vector<LabeledGamma> default_gamma_policies()
{
    return {{"bic", GammaPolicy::fixed(0.0)},
            {"sc", GammaPolicy::scaled_consistent(4.0)},
            {"mbic", GammaPolicy::fixed(1.0)}};
}

StudyConfig StudyConfig::desk()
{
    return StudyConfig{};
}

StudyConfig StudyConfig::full()
{
    StudyConfig c;
    c.structures = {CovarianceKind::PowerDecay, CovarianceKind::EquiBlock, CovarianceKind::EigenBlock};
    c.c_values = {1, 2};
    c.n_values = {100, 200, 500, 1000};
    c.replicates = 200;
    return c;
}

void StudyConfig::validate() const
{
    if (structures.empty()) throw InvalidConfig("structures must be nonempty");
    if (c_values.empty()) throw InvalidConfig("c_values must be nonempty");
    for (int c : c_values)
        if (c < 1) throw InvalidConfig("c values must be positive");
    if (n_values.empty()) throw InvalidConfig("n_values must be nonempty");
    for (auto n : n_values) {
        if (n < 4) throw InvalidConfig("n values must be at least 4");
        pipeline.validate(n);
    }
    if (h_values.empty()) throw InvalidConfig("h_values must be nonempty");
    for (double h : h_values)
        if (!(h > 0.0 && h < 1.0)) throw InvalidConfig("h values must lie in (0, 1)");
    if (gamma_policies.empty()) throw InvalidConfig("gamma_policies must be nonempty");
    for (size_t i = 0; i < gamma_policies.size(); ++i) {
        if (gamma_policies[i].label.empty()) throw InvalidConfig("gamma labels must be nonempty");
        for (size_t j = 0; j < i; ++j)
            if (gamma_policies[i].label == gamma_policies[j].label) throw InvalidConfig("duplicate gamma label '" + gamma_policies[i].label + "'");
    }
    if (replicates < 1) throw InvalidConfig("replicates must be at least 1");
    if (calibration_n < 2) throw InvalidConfig("calibration_n must be at least 2");
    covariance_spec(*this, CovarianceKind::EquiBlock, 2).validate();
    covariance_spec(*this, CovarianceKind::EigenBlock, 2).validate();
}

std::uint64_t setting_id(const SettingKey& key)
{
    std::uint64_t h = mix64(structure_code(key.structure));
    h = mix64(h ^ static_cast<std::uint64_t>(key.c));
    h = mix64(h ^ static_cast<std::uint64_t>(key.n));
    h = mix64(h ^ static_cast<std::uint64_t>(std::llround(key.h * 1e6)));
    return h;
}

SettingContext prepare_setting(const StudyConfig& config, const SettingKey& key)
{
    SettingContext ctx{key, divergence_schedule(key.n, key.c), {}, config.beta, 0.0, {}};
    ctx.factor = realize_covariance(config, key.structure, ctx.schedule.p);
    ctx.beta.n_ref = static_cast<double>(key.n);

    // Noise level from the calibration sample size, with this setting's c.
    const ScheduleEntry ref = divergence_schedule(config.calibration_n, key.c);
    BetaSpec ref_beta = config.beta;
    ref_beta.n_ref = static_cast<double>(config.calibration_n);
    const CovarianceFactor ref_factor =
        ref.p == ctx.schedule.p ? ctx.factor : realize_covariance(config, key.structure, ref.p);
    ctx.sigma2 = calibrate_sigma2(key.h, ref_factor, ref_beta, place_support(ref.p, ref.p0, config.placement));

    if (config.fixed_beta) {
        auto rng = derive_stream(config.master_seed, setting_id(key), fixed_beta_stream);
        ctx.fixed_beta = sample_beta(ctx.beta, ctx.schedule.p0, rng);
    }
    return ctx;
}

Dataset replicate_dataset(const StudyConfig& config, const SettingContext& ctx, index_t replicate)
{
    auto rng = derive_stream(config.master_seed, setting_id(ctx.key), static_cast<std::uint64_t>(replicate));
    return generate_replicate(ctx.schedule, ctx.factor, ctx.beta, ctx.sigma2, rng, config.placement,
                              config.fixed_beta ? &ctx.fixed_beta : nullptr);
}

std::vector<ReplicateRecord> run_setting(const StudyConfig& config, const SettingKey& key)
{
    const SettingContext ctx = prepare_setting(config, key);
    const size_t g_count = config.gamma_policies.size();
    const auto r_count = static_cast<size_t>(config.replicates);

    std::vector<GammaPolicy> policies;
    for (const auto& g : config.gamma_policies) policies.push_back(g.policy);

    // slot (g, r) at g * r_count + r
    std::vector<ReplicateRecord> out(g_count * r_count);
    auto run_one = [&](size_t r) {
        std::vector<ReplicateRecord> recs(g_count);
        for (size_t g = 0; g < g_count; ++g) {
            recs[g].setting = key;
            recs[g].gamma_label = config.gamma_policies[g].label;
            recs[g].replicate = static_cast<index_t>(r);
        }
        try {
            const Dataset d = replicate_dataset(config, ctx, static_cast<index_t>(r));
            const auto sel = run_two_stage_multi(d.x, d.y, config.pipeline, policies);
            for (size_t g = 0; g < g_count; ++g) {
                const auto rates = pdr_fdr(sel[g].selected, d.true_support);
                recs[g].pdr = rates.pdr;
                recs[g].fdr = rates.fdr;
                recs[g].selected_size = sel[g].selected.size();
                recs[g].lambda_star = sel[g].lambda_star;
            }
        } catch (const std::exception& e) {
            std::string status = std::string("error: ") + e.what();
            std::replace(status.begin(), status.end(), '\n', ' ');
            for (auto& rec : recs) rec.status = status;
        }
        for (size_t g = 0; g < g_count; ++g) out[g * r_count + r] = std::move(recs[g]);
    };

    unsigned workers = config.workers ? config.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<size_t>(workers, r_count));
    if (workers <= 1) {
        for (size_t r = 0; r < r_count; ++r) run_one(r);
        return out;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (size_t r; (r = next.fetch_add(1)) < r_count;) run_one(r);
        });
    }
    for (auto& t : pool) t.join();
    return out;
}

StudyResult run_study(const StudyConfig& config, const ProgressFn& progress)
{
    config.validate();
    StudyResult res;
    for (auto s : config.structures)
        for (int c : config.c_values)
            for (auto n : config.n_values)
                for (double h : config.h_values) {
                    const SettingKey key{s, c, n, h};
                    auto recs = run_setting(config, key);
                    res.records.insert(res.records.end(), std::make_move_iterator(recs.begin()),
                                       std::make_move_iterator(recs.end()));
                    if (progress) progress(key);
                }
    res.summaries = aggregate(res.records);
    return res;
}

std::vector<SettingSummary> aggregate(const std::vector<ReplicateRecord>& records)
{
    // Group in first-appearance order, values sorted by replicate index.
    std::vector<std::pair<SettingKey, std::string>> order;
    std::map<std::pair<SettingKey, std::string>, std::vector<const ReplicateRecord*>> groups;
    for (const auto& r : records) {
        auto k = std::make_pair(r.setting, r.gamma_label);
        auto [it, fresh] = groups.try_emplace(k);
        if (fresh) order.push_back(k);
        it->second.push_back(&r);
    }

    std::vector<SettingSummary> out;
    for (const auto& k : order) {
        auto& recs = groups[k];
        std::stable_sort(recs.begin(), recs.end(),
                         [](const auto* a, const auto* b) { return a->replicate < b->replicate; });
        std::vector<double> pdr, fdr;
        index_t failures = 0;
        for (const auto* r : recs) {
            if (r->ok()) {
                pdr.push_back(r->pdr);
                fdr.push_back(r->fdr);
            } else {
                ++failures;
            }
        }
        SettingSummary s;
        s.setting = k.first;
        s.gamma_label = k.second;
        const auto mp = mean_sd(pdr);
        const auto mf = mean_sd(fdr);
        s.pdr_mean = mp.mean;
        s.pdr_sd = mp.sd;
        s.fdr_mean = mf.mean;
        s.fdr_sd = mf.sd;
        s.replicates_completed = static_cast<index_t>(pdr.size());
        s.failures = failures;
        const auto total = static_cast<double>(recs.size());
        s.flagged = s.replicates_completed <= 1 || static_cast<double>(failures) > 0.1 * total;
        out.push_back(s);
    }
    return out;
}

} // namespace ebicsel

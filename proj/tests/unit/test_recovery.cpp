#include "sft/errors.hpp"
#include "sft/harness.hpp"
#include "sft/recovery.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace sft;

namespace {

struct Planted {
    Spectrum xhat;
    Signal x;
    std::vector<std::size_t> support;
};

Planted planted(const Universe& u, std::size_t k, std::uint64_t seed, double sigma = 0.0) {
    Rng rng(seed);
    Spectrum xhat(u);
    if (sigma > 0)
        for (auto& v : xhat.values) v = {rng.normal(0, sigma), rng.normal(0, sigma)};
    std::vector<std::size_t> support;
    while (support.size() < k) {
        const std::size_t f = rng.below(u.n());
        if (std::find(support.begin(), support.end(), f) != support.end()) continue;
        support.push_back(f);
        xhat[f] = std::polar(rng.uniform(0.5, 1.0), rng.uniform(0, 6.28));
    }
    std::sort(support.begin(), support.end());
    Signal x = TensorDft(u).inverse(xhat);
    return {std::move(xhat), std::move(x), std::move(support)};
}

AuditedSignal audited_for(const Signal& x, const RecoveryPlan& plan) {
    const auto pts = plan.bundle.all_points();
    return AuditedSignal(x, pts);
}

} // namespace

TEST(Profiles, Constants) {
    const RecoveryConfig p = RecoveryConfig::paper();
    EXPECT_EQ(p.c_b, 1'000'000);
    EXPECT_EQ(p.c_r, 1'000);
    EXPECT_EQ(p.c_h, 20);
    EXPECT_DOUBLE_EQ(p.alpha, 1e-3);
    EXPECT_DOUBLE_EQ(p.beta, 0.04);
    EXPECT_EQ(p.c_s, 26);
    EXPECT_NO_THROW(p.validate());

    const RecoveryConfig d = RecoveryConfig::desk();
    EXPECT_EQ(d.c_b, 8);
    EXPECT_EQ(d.c_r, 4);
    EXPECT_EQ(d.c_h, 3);
    EXPECT_DOUBLE_EQ(d.alpha, 0.02);
    EXPECT_DOUBLE_EQ(d.beta, 0.08);
    EXPECT_NO_THROW(d.validate());
}

TEST(Profiles, ValidationAndOverrides) {
    RecoveryConfig c = RecoveryConfig::desk();
    c.set("C_B", 16);
    EXPECT_EQ(c.c_b, 16);
    c.set("beta", 0.05);
    EXPECT_DOUBLE_EQ(c.beta, 0.05);
    EXPECT_THROW(c.set("C_B", 1.5), ConfigError);
    EXPECT_THROW(c.set("gamma", 1), ConfigError);

    RecoveryConfig bad = RecoveryConfig::desk();
    bad.alpha = 0.05;  // beta/2 < alpha
    EXPECT_THROW(bad.validate(), ConfigError);
    bad = RecoveryConfig::desk();
    bad.beta = 0.2;
    EXPECT_THROW(bad.validate(), ConfigError);
    bad = RecoveryConfig::desk();
    bad.c_r = 0;
    EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(SampleBudget, DeskExample) {
    EXPECT_EQ(sample_budget(RecoveryConfig::desk(), Universe(16, 3), 4, 1024), 32u * 48u * 5u);
    EXPECT_EQ(sample_budget(RecoveryConfig::desk(), Universe(16, 3), 4, 1024), 7680u);
}

TEST(SampleBudget, RoundsCappedByLogRStar) {
    RecoveryConfig c = RecoveryConfig::desk();
    c.c_h = 12;
    const Schedule s = make_schedule(c, Universe(4, 4), 1, 256);
    EXPECT_EQ(s.rounds, 8u);
    EXPECT_EQ(s.iterations, 1u);
}

TEST(SampleBudget, DoublingRStarPastCap) {
    const Universe u(16, 3);
    const RecoveryConfig c = RecoveryConfig::desk();
    const Schedule a = make_schedule(c, u, 4, 1 << 10);
    const Schedule b = make_schedule(c, u, 4, 1 << 11);
    EXPECT_EQ(a.total_samples(), b.total_samples());
    EXPECT_EQ(b.iterations, a.iterations + 1);
}

TEST(SampleBudget, RunAuditMatches) {
    // R* = 2^5 keeps H = 5 and L = 1, so no round floor applies
    const Universe u(16, 3);
    const Planted in = planted(u, 4, 3);
    const RecoveryConfig c = RecoveryConfig::desk();
    const double r_star = 32;
    const RecoveryPlan plan = plan_recovery(c, u, 4, r_star, 9);
    EXPECT_EQ(plan.config, c);
    const AuditedSignal x = audited_for(in.x, plan);
    const RecoveryResult r = fourier_sparse_recovery(x, 4, 1.0 / 32, r_star, c, 9);
    EXPECT_EQ(r.samples_used, sample_budget(c, u, 4, r_star));
    EXPECT_EQ(x.total_reads(), r.samples_used);
}

TEST(Schedule, RStarValidation) {
    EXPECT_THROW(make_schedule(RecoveryConfig::desk(), Universe(4, 2), 2, 1.0), ConfigError);
    EXPECT_THROW(make_schedule(RecoveryConfig::desk(), Universe(4, 2), 0, 8.0), ConfigError);
    EXPECT_EQ(make_schedule(RecoveryConfig::desk(), Universe(4, 2), 2, 5.0).r_star, 8u);
    EXPECT_EQ(make_schedule(RecoveryConfig::desk(), Universe(1, 3), 1, 4.0).repetitions, 4u);
}

TEST(Schedule, RadiusLadder) {
    const Schedule s = make_schedule(RecoveryConfig::desk(), Universe(16, 3), 2, 1 << 12);
    const double mu = 0.37;
    for (std::size_t l = 1; l < s.iterations; ++l) EXPECT_EQ(s.nu(l + 1, mu), s.nu(l, mu) / 2);
    EXPECT_EQ(std::ldexp(s.nu(s.iterations, mu), 1 - static_cast<int>(s.rounds)), mu);
}

TEST(EffectiveConfig, RaisesRoundsOnlyWhenShiftsHappen) {
    const Universe u(16, 3);
    const RecoveryConfig desk = RecoveryConfig::desk();
    EXPECT_EQ(shift_round_floor(0.02, 8), 13u);
    // H = 5 = log2 R*, L = 1 without adjustment: untouched
    EXPECT_EQ(effective_config(desk, u, 8, 32), desk);
    // H = 6, L = 3 would shift in an unsafe regime; raising H to the cap
    // leaves a single iteration
    const RecoveryConfig capped = effective_config(desk, u, 8, 256);
    EXPECT_EQ(capped.c_h, 10);
    EXPECT_EQ(make_schedule(capped, u, 8, 256).iterations, 1u);
    const RecoveryConfig eff = effective_config(desk, u, 8, 1 << 16);
    EXPECT_EQ(eff.c_h, 10);
    const Schedule s = make_schedule(eff, u, 8, 1 << 16);
    EXPECT_EQ(s.rounds, 13u);
    EXPECT_EQ(s.iterations, 4u);
    EXPECT_LE(std::ldexp(1.0, 1 - static_cast<int>(s.rounds)), desk.alpha / (8.0 * 8));
}

TEST(FourierSparseRecovery, NoiselessExact) {
    const Universe u(16, 3);
    for (std::size_t k : {1u, 3u, 8u}) {
        const Planted in = planted(u, k, 100 + k);
        const OracleResult o = oracle_top_k(in.x, static_cast<std::int64_t>(k));
        const RecoveryConfig c = RecoveryConfig::desk();
        const auto kk = static_cast<std::int64_t>(k);
        const RecoveryPlan plan = plan_recovery(c, u, kk, static_cast<double>(o.r_star), 5);
        const AuditedSignal x = audited_for(in.x, plan);
        const RecoveryResult r = fourier_sparse_recovery(x, kk, o.mu_floor, static_cast<double>(o.r_star), c, 5);
        EXPECT_EQ(r.y.support(), in.support) << "k=" << k;
        for (auto f : in.support) EXPECT_NEAR(std::abs(r.y.get(f) - in.xhat[f]), 0, 1e-6);
        EXPECT_GE(r.iterations.size(), 2u);
    }
}

TEST(FourierSparseRecovery, ZeroSignal) {
    const Universe u(8, 2);
    const RecoveryConfig c = RecoveryConfig::desk();
    const RecoveryPlan plan = plan_recovery(c, u, 3, 1 << 12, 1);
    const AuditedSignal x = audited_for(Signal(u), plan);
    const RecoveryResult r = fourier_sparse_recovery(x, 3, 1e-3, 1 << 12, c, 1);
    EXPECT_TRUE(r.y.empty());
}

TEST(FourierSparseRecovery, Deterministic) {
    const Universe u(8, 3);
    const Planted in = planted(u, 4, 17, 1e-3);
    const OracleResult o = oracle_top_k(in.x, 4);
    const RecoveryConfig c = RecoveryConfig::desk();
    const RecoveryPlan plan = plan_recovery(c, u, 4, static_cast<double>(o.r_star), 77);
    const AuditedSignal x1 = audited_for(in.x, plan);
    const AuditedSignal x2 = audited_for(in.x, plan);
    const auto a = fourier_sparse_recovery(x1, 4, o.mu_floor, static_cast<double>(o.r_star), c, 77);
    const auto b = fourier_sparse_recovery(x2, 4, o.mu_floor, static_cast<double>(o.r_star), c, 77);
    EXPECT_EQ(a.y.entries(), b.y.entries());
}

TEST(FourierSparseRecovery, ReadsOnlyDeclaredBundle) {
    const Universe u(16, 3);
    const Planted in = planted(u, 2, 4);
    const RecoveryConfig c = RecoveryConfig::desk();
    // bundle declared for another seed: the run must trip the audit
    const RecoveryPlan other = plan_recovery(c, u, 2, 64, 1);
    const AuditedSignal x = audited_for(in.x, other);
    EXPECT_THROW(fourier_sparse_recovery(x, 2, 1.0 / 64, 64, c, 2), AuditViolation);
}

TEST(FourierSparseRecovery, InputErrors) {
    const Universe u(4, 2);
    const RecoveryConfig c = RecoveryConfig::desk();
    const RecoveryPlan plan = plan_recovery(c, u, 1, 8, 1);
    const AuditedSignal x = audited_for(Signal(u), plan);
    EXPECT_THROW(fourier_sparse_recovery(x, 1, 0.0, 8, c, 1), ConfigError);
    EXPECT_THROW(fourier_sparse_recovery(x, 0, 1.0, 8, c, 1), ConfigError);
    EXPECT_THROW(fourier_sparse_recovery(x, 1, 1.0, 1.0, c, 1), ConfigError);
    EXPECT_THROW(fourier_sparse_recovery(x, 17, 1.0, 8, c, 1), ConfigError);
}

TEST(ByProjection, NoiselessExact) {
    const Universe u(16, 3);
    const Planted in = planted(u, 4, 55);
    const OracleResult o = oracle_top_k(in.x, 4);
    const RecoveryConfig c = RecoveryConfig::desk();
    const RecoveryPlan plan = plan_recovery_by_projection(c, u, 4, static_cast<double>(o.r_star), 3);
    const AuditedSignal x = audited_for(in.x, plan);
    const RecoveryResult r =
        fourier_sparse_recovery_by_projection(x, 4, o.mu_floor, static_cast<double>(o.r_star), c, 3);
    EXPECT_EQ(r.y.support(), in.support);
    for (auto f : in.support) EXPECT_NEAR(std::abs(r.y.get(f) - in.xhat[f]), 0, 1e-6);
    EXPECT_EQ(r.samples_used, plan.schedule.total_samples());
    EXPECT_EQ(plan.schedule.rounds, 5u);
}

TEST(ByProjection, SingleIterationIsReduceFromZero) {
    const Universe u(8, 3);
    const Planted in = planted(u, 2, 8, 1e-3);
    const RecoveryConfig c = RecoveryConfig::desk();
    const double r_star = 32;  // 2^H with H = 5
    const double mu = 0.03;
    const RecoveryPlan plan = plan_recovery_by_projection(c, u, 2, r_star, 4);
    const AuditedSignal x = audited_for(in.x, plan);
    const RecoveryResult r = fourier_sparse_recovery_by_projection(x, 2, mu, r_star, c, 4);
    ASSERT_EQ(r.iterations.size(), 1u);

    const AuditedSignal x2 = audited_for(in.x, plan);
    const auto rounds = measure_bundle(x2, plan.bundle);
    const SparseApprox z = reduce_h_rounds(SparseApprox(u), rounds, mu * r_star / 2, 5, TensorDft(u));
    EXPECT_EQ(r.y.entries(), z.entries());
}

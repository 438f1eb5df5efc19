// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include "sft/errors.hpp"
#include "sft/grid_shift.hpp"
#include "sft/harness.hpp"
#include "sft/recovery.hpp"
#include "sft/sampling.hpp"
#include "sft/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <vector>

using namespace sft;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// ---- A1 ----------------------------------------------------------------

// O(n^2) reference built from per-index digit tables and its own twiddles.
double direct_error(const Universe& u, const std::vector<Complex>& x, const std::vector<Complex>& xhat) {
    const std::size_t n = u.n(), d = u.d(), p = u.p();
    std::vector<std::uint32_t> digits(n * d);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t rest = i;
        for (std::size_t a = 0; a < d; ++a) {
            digits[i * d + a] = static_cast<std::uint32_t>(rest % p);
            rest /= p;
        }
    }
    std::vector<Complex> tw(p);
    for (std::size_t j = 0; j < p; ++j)
        tw[j] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(p));
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    double worst = 0.0;
    for (std::size_t f = 0; f < n; ++f) {
        const std::uint32_t* fd = &digits[f * d];
        Complex acc{};
        for (std::size_t t = 0; t < n; ++t) {
            const std::uint32_t* td = &digits[t * d];
            std::size_t e = 0;
            for (std::size_t a = 0; a < d; ++a) e += static_cast<std::size_t>(fd[a]) * td[a];
            acc += x[t] * tw[e % p];
        }
        worst = std::max(worst, std::abs(acc * scale - xhat[f]));
    }
    return worst;
}

Outcome a1() {
    const auto t0 = Clock::now();
    double rt = 0.0, direct = 0.0;
    for (auto [p, d] : {std::pair{2, 10}, {3, 7}, {6, 4}, {16, 3}, {1024, 1}}) {
        const Universe u(p, d);
        const TensorDft dft(u);
        Rng rng = Rng::stream(101, {static_cast<std::uint64_t>(p), static_cast<std::uint64_t>(d)});
        Signal x(u);
        for (auto& v : x.values) v = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
        const Spectrum xhat = dft.forward(x);
        const Signal back = dft.inverse(xhat);
        for (std::size_t t = 0; t < u.n(); ++t) rt = std::max(rt, std::abs(back[t] - x[t]));
        direct = std::max(direct, direct_error(u, x.values, xhat.values));
    }
    const double secs = seconds_since(t0);
    return {rt <= 1e-9 && direct <= 1e-9 && secs < 10.0,
            fmt("round-trip %.2e, vs direct sum %.2e (tol 1e-9), %.2fs (< 10s)", rt, direct, secs)};
}

// ---- A2 ----------------------------------------------------------------

Outcome a2() {
    const auto t0 = Clock::now();
    const Universe u(16, 3);
    const std::size_t B = 64, draws = 10'000;
    Rng rng(202);
    double c0_worst = 0.0;
    bool moments_ok = true;
    double worst_ratio = 0.0;
    for (std::size_t f : {1u, 18u, 273u, 1365u, 4095u}) {
        std::vector<double> sq(draws);
        for (auto& s : sq) {
            const SampleList T = draw_sample_list(u, B, rng);
            c0_worst = std::max(c0_worst, std::abs(coefficient(0, T) - 1.0));
            s = std::norm(coefficient(f, T));
        }
        double mean = 0.0;
        for (double s : sq) mean += s;
        mean /= draws;
        double var = 0.0;
        for (double s : sq) var += (s - mean) * (s - mean);
        const double sd = std::sqrt(var / (draws - 1));
        const double gap = std::abs(mean - 1.0 / B);
        const double band = 3.0 * sd / 100.0;
        moments_ok = moments_ok && gap <= band;
        worst_ratio = std::max(worst_ratio, gap / band);
    }
    const double secs = seconds_since(t0);
    return {c0_worst <= 1e-12 && moments_ok && secs < 10.0,
            fmt("max |c_0 - 1| = %.1e, worst |mean|c_f|^2 - 1/64| / (3 sd/100) = %.2f, %.2fs", c0_worst, worst_ratio,
                secs)};
}

// ---- A3 ----------------------------------------------------------------

Outcome a3() {
    const auto t0 = Clock::now();
    const Universe u(64, 1);
    Rng rng(303);
    Spectrum xhat(u);
    for (auto& v : xhat.values) v = {rng.normal(), rng.normal()};
    std::vector<std::size_t> V;
    for (std::size_t g = 0; g < u.n(); ++g)
        if (g != 7) V.push_back(g);
    const double rate = noise_bound_check(xhat, 7, V, 32, 10'000, rng);
    const double secs = seconds_since(t0);
    return {rate <= 0.02 && secs < 10.0, fmt("exceedance rate %.4f (<= 0.02), %.2fs", rate, secs)};
}

// ---- A4 ----------------------------------------------------------------

Outcome a4() {
    const auto t0 = Clock::now();
    bool ok = true;
    std::string detail;
    Rng rng(404);
    for (double ratio : {0.5, 0.1, 0.01}) {
        const double r_s = 0.37;
        const GridSpec grid{2.0 * r_s};
        const Complex center{rng.uniform(-5, 5), rng.uniform(-5, 5)};
        const std::size_t draws = 10'000;
        std::size_t good = 0;
        for (std::size_t i = 0; i < draws; ++i) {
            const Complex s{rng.uniform(-r_s, r_s), rng.uniform(-r_s, r_s)};
            good += box_projects_uniquely(Box{center + s, ratio * r_s}, grid);
        }
        const double rate = static_cast<double>(good) / draws;
        const double q = (1 - ratio) * (1 - ratio);
        const double floor = q - 3.0 * std::sqrt(q * (1 - q) / draws);
        ok = ok && rate >= floor;
        detail += fmt("%s%g: %.4f >= %.4f", detail.empty() ? "" : ", ", ratio, rate, floor);
    }
    const double secs = seconds_since(t0);
    return {ok && secs < 5.0, detail + fmt(", %.2fs", secs)};
}

// ---- A5 / A7 / A10 -----------------------------------------------------

ExperimentConfig a5_config(double snr, std::uint64_t seed) {
    ExperimentConfig cfg;
    cfg.signal.p = 16;
    cfg.signal.d = 3;
    cfg.signal.k = 8;
    cfg.signal.sigma = sigma_for_ratio(4096, 8, 1.0, snr);
    cfg.signal.seed = seed;
    cfg.recovery = RecoveryConfig::desk();
    cfg.trials = 100;
    return cfg;
}

struct AuditTally {
    std::size_t runs = 0;
    std::size_t exact = 0;
    std::string first_problem;

    void record(bool ok, const std::string& what) {
        ++runs;
        if (ok) ++exact;
        else if (first_problem.empty()) first_problem = what;
    }
};

AuditTally audit;

Report a5_report;
bool a5_ran = false;

Outcome a5() {
    try {
        a5_report = run_experiment(a5_config(256.0, 505));
    } catch (const AuditViolation& e) {
        audit.record(false, e.what());
        return {false, std::string("audit violation: ") + e.what()};
    }
    a5_ran = true;
    const Universe u(16, 3);
    double slowest = 0.0;
    std::set<std::uint64_t> r_stars;
    for (const auto& m : a5_report.trials) {
        slowest = std::max(slowest, m.wall_ms);
        r_stars.insert(m.r_star);
        const auto r_star = static_cast<double>(m.r_star);
        const std::size_t budget = sample_budget(effective_config(a5_report.config.recovery, u, 8, r_star), u, 8, r_star);
        audit.record(m.samples_used == budget, fmt("A5 trial %zu read %zu, budget %zu", m.trial, m.samples_used, budget));
    }
    const auto& a = a5_report.aggregates;
    std::string rs;
    for (auto r : r_stars) rs += (rs.empty() ? "" : "/") + std::to_string(r);
    return {a.successes >= 95 && slowest < 5000.0,
            fmt("%zu/100 within (1/sqrt k)||xhat_-k||_2 (>= 95), slowest run %.0f ms (< 5000), R* in {%s}",
                a.successes, slowest, rs.c_str())};
}

Outcome a6() {
    const Universe u(16, 3);
    std::size_t exact = 0, total = 0;
    std::string detail;
    for (std::int64_t k : {1, 4, 16}) {
        std::size_t ok_k = 0;
        for (std::uint64_t s = 0; s < 20; ++s) {
            ++total;
            SignalSpec spec;
            spec.p = 16;
            spec.d = 3;
            spec.k = k;
            spec.seed = Rng::derive(606, {static_cast<std::uint64_t>(k), s});
            const GeneratedSignal g = gen_signal(spec);
            const RecoveryConfig cfg = RecoveryConfig::desk();
            const OracleResult o = oracle_top_k(g.x, k, cfg.mu_min);
            const auto r_star = static_cast<double>(o.r_star);
            const std::uint64_t run_seed = Rng::derive(spec.seed, {1});
            const RecoveryPlan plan = plan_recovery(cfg, u, k, r_star, run_seed);
            const auto declared = plan.bundle.all_points();
            const AuditedSignal x(g.x, declared);
            std::optional<RecoveryResult> r;
            try {
                r = fourier_sparse_recovery(x, k, o.mu_floor, r_star, cfg, run_seed);
            } catch (const AuditViolation& e) {
                audit.record(false, e.what());
                continue;
            } catch (const ShiftSearchFailed& e) {
                audit.record(x.total_reads() == plan.schedule.total_samples(), "A6 shift failure");
                continue;
            }
            const std::set<std::size_t> distinct(declared.begin(), declared.end());
            audit.record(x.total_reads() == plan.schedule.total_samples() && x.distinct_reads() == distinct.size() &&
                             r->samples_used == sample_budget(plan.config, u, k, r_star),
                         fmt("A6 k=%lld seed %llu read %zu of %zu", static_cast<long long>(k),
                             static_cast<unsigned long long>(s), x.total_reads(), plan.schedule.total_samples()));

            double err = 0.0;
            for (std::size_t f = 0; f < u.n(); ++f) err = std::max(err, std::abs(r->y.get(f) - g.truth[f]));
            if (r->y.support() == g.planted && err <= 1e-6) ++ok_k;
        }
        exact += ok_k;
        detail += fmt("%sk=%lld: %zu/20", detail.empty() ? "" : ", ", static_cast<long long>(k), ok_k);
    }
    return {exact == total, detail + " exact (support equal, values within 1e-6)"};
}

Outcome a7() {
    if (audit.runs == 0) return {false, "no A5/A6 runs were audited"};
    return {audit.exact == audit.runs,
            fmt("%zu/%zu runs read exactly B*R*H declared points, no out-of-bundle reads%s%s", audit.exact,
                audit.runs, audit.first_problem.empty() ? "" : "; first problem: ", audit.first_problem.c_str())};
}

// ---- A8 / A9 -----------------------------------------------------------

Outcome a8() {
    SignalSpec spec;
    spec.p = 16;
    spec.d = 3;
    spec.k = 8;
    spec.sigma = sigma_for_ratio(4096, 8, 1.0, 256.0);
    const HalvingOutcome desk = halving_experiment(spec, RecoveryConfig::desk(), 100, 808);
    RecoveryConfig big = RecoveryConfig::desk();
    big.c_b = 256;
    big.c_r = 32;
    const HalvingOutcome wide = halving_experiment(spec, big, 100, 809);
    const bool ok = desk.admitted == 100 && wide.admitted == 100 && desk.successes >= 90 && wide.successes >= 98;
    return {ok, fmt("desk %zu/100 (>= 90), C_B=256 C_R=32 %zu/100 (>= 98); precondition confirmed on %zu+%zu inputs",
                    desk.successes, wide.successes, desk.admitted, wide.admitted)};
}

Outcome a9() {
    ExperimentConfig cfg;
    cfg.signal.p = 16;
    cfg.signal.d = 3;
    cfg.signal.k = 4;
    cfg.signal.sigma = sigma_for_ratio(4096, 4, 1.0, 256.0);
    cfg.signal.seed = 909;
    cfg.recovery = RecoveryConfig::desk();
    cfg.algorithm = Algorithm::warmup;
    cfg.trials = 100;
    const Report r = run_experiment(cfg);
    return {r.aggregates.successes >= 90, fmt("%zu/100 within the noise floor (>= 90)", r.aggregates.successes)};
}

// ---- A10 ---------------------------------------------------------------

Outcome a10() {
    const int cap = 10 * Universe(16, 3).ceil_log2_n();
    if (!a5_ran) return {false, "A5 runs unavailable"};
    const auto& a = a5_report.aggregates;
    const bool a5_ok = a.shift_iterations == 0 ||
                       (a.mean_attempts_per_iteration <= 2.0 && a.max_attempts <= cap && a.shift_failures == 0);

    // At ||xhat||_inf / mu ~ 2^8 the schedule has a single outer iteration and
    // never shifts, so the bound is also checked on a batch that does.
    const Report hi = run_experiment(a5_config(65536.0, 1010));
    const auto& b = hi.aggregates;
    const bool hi_ok = b.shift_iterations > 0 && b.mean_attempts_per_iteration <= 2.0 && b.max_attempts <= cap &&
                       b.shift_failures == 0;
    return {a5_ok && hi_ok,
            fmt("A5 runs: %zu shift iterations%s; SNR 2^16 batch: %zu iterations, mean %.3f (<= 2), max %d (<= %d), "
                "%zu/100 within the noise floor",
                a.shift_iterations, a.shift_iterations == 0 ? " (single outer iteration)" : "", b.shift_iterations,
                b.mean_attempts_per_iteration, b.max_attempts, cap, b.successes)};
}

} // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"A1 dft correctness", a1},      {"A2 coefficient moments", a2}, {"A3 noise bound", a3},
        {"A4 random shift", a4},         {"A5 end-to-end linf/l2", a5},  {"A6 noiseless exactness", a6},
        {"A7 sample audit", a7},         {"A8 linf reduce halving", a8}, {"A9 warm-up algorithm", a9},
        {"A10 shift attempts", a10},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        const auto t0 = Clock::now();
        Outcome o{false, ""};
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%-26s %s  %s [%.1fs]\n", name, o.pass ? "PASS" : "FAIL", o.detail.c_str(), seconds_since(t0));
        std::fflush(stdout);
        if (!o.pass) ++failed;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}

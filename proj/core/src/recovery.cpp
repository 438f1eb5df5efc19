#include "sft/recovery.hpp"

#include "sft/errors.hpp"
#include "sft/grid_shift.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace sft {

namespace {

int ceil_log2(std::uint64_t v) {
    int bits = 0;
    while ((std::uint64_t{1} << bits) < v) ++bits;
    return bits;
}

void require_positive(std::int64_t v, const char* name) {
    if (v < 1) throw ConfigError(std::string("config: ") + name + " must be >= 1, got " + std::to_string(v));
}

constexpr std::size_t kWarmupRounds = 5;
constexpr double kWarmupGrid = 0.6;

} // namespace

RecoveryConfig RecoveryConfig::paper() {
    RecoveryConfig c;
    c.c_b = 1'000'000;
    c.c_r = 1'000;
    c.c_h = 20;
    c.alpha = 1e-3;
    c.beta = 0.04;
    c.c_s = 26;
    return c;
}

RecoveryConfig RecoveryConfig::desk() { return RecoveryConfig{}; }

void RecoveryConfig::validate() const {
    require_positive(c_b, "C_B");
    require_positive(c_r, "C_R");
    require_positive(c_h, "C_H");
    require_positive(c_s, "C_S");
    require_positive(max_shift_attempts_factor, "max_shift_attempts_factor");
    if (!(alpha > 0.0 && alpha < beta && beta < 0.1))
        throw ConfigError("config: need 0 < alpha < beta < 0.1 (alpha=" + std::to_string(alpha) +
                          ", beta=" + std::to_string(beta) + ")");
    if (!(beta / 2.0 >= alpha))
        throw ConfigError("config: need beta/2 >= alpha so the shift stays within half a grid cell");
    if (!(mu_min > 0.0)) throw ConfigError("config: mu_min must be positive");
}

void RecoveryConfig::set(const std::string& name, double value) {
    auto as_int = [&](std::int64_t& slot) {
        if (value != std::floor(value)) throw ConfigError("config: " + name + " must be an integer");
        slot = static_cast<std::int64_t>(value);
    };
    if (name == "C_B") as_int(c_b);
    else if (name == "C_R") as_int(c_r);
    else if (name == "C_H") as_int(c_h);
    else if (name == "C_S") as_int(c_s);
    else if (name == "alpha") alpha = value;
    else if (name == "beta") beta = value;
    else if (name == "mu_min") mu_min = value;
    else if (name == "max_shift_attempts_factor") {
        std::int64_t v = 0;
        as_int(v);
        max_shift_attempts_factor = static_cast<int>(v);
    } else
        throw ConfigError("config: unknown constant '" + name + "'");
}

double Schedule::nu(std::size_t l, double mu) const {
    return std::ldexp(mu * static_cast<double>(r_star), -static_cast<int>(l));
}

std::uint64_t round_up_pow2(double value) {
    if (!(value <= std::ldexp(1.0, 62))) throw ConfigError("R* too large: " + std::to_string(value));
    std::uint64_t r = 2;
    while (static_cast<double>(r) < value) r <<= 1;
    return r;
}

std::size_t shift_round_floor(double alpha, std::int64_t k) {
    const double limit = alpha / (8.0 * static_cast<double>(k));
    std::size_t H = 1;
    while (std::ldexp(1.0, 1 - static_cast<int>(H)) > limit) ++H;
    return H;
}

Schedule make_schedule(const RecoveryConfig& config, const Universe& u, std::int64_t k, double r_star) {
    config.validate();
    if (k < 1) throw ConfigError("schedule: k must be >= 1");
    if (!(r_star >= 2.0)) throw ConfigError("schedule: R* must be >= 2, got " + std::to_string(r_star));
    Schedule s;
    s.r_star = round_up_pow2(r_star);
    s.log2_r_star = ceil_log2(s.r_star);
    s.bucket = static_cast<std::size_t>(config.c_b * k);
    // log2 n = 0 only for n = 1; keep one repetition there.
    s.repetitions = static_cast<std::size_t>(config.c_r * std::max(1, u.ceil_log2_n()));
    const std::size_t wanted = static_cast<std::size_t>(ceil_log2(static_cast<std::uint64_t>(k)) + config.c_h);
    s.rounds = std::min(wanted, static_cast<std::size_t>(s.log2_r_star));
    s.iterations = static_cast<std::size_t>(s.log2_r_star) - s.rounds + 1;
    return s;
}

RecoveryConfig effective_config(const RecoveryConfig& config, const Universe& u, std::int64_t k, double r_star) {
    const Schedule s = make_schedule(config, u, k, r_star);
    RecoveryConfig out = config;
    if (s.iterations < 2) return out;
    const std::size_t floor_rounds = shift_round_floor(config.alpha, k);
    if (s.rounds < floor_rounds)
        out.c_h = static_cast<std::int64_t>(floor_rounds) - ceil_log2(static_cast<std::uint64_t>(k));
    return out;
}

std::size_t sample_budget(const RecoveryConfig& config, const Universe& u, std::int64_t k, double r_star) {
    return make_schedule(config, u, k, r_star).total_samples();
}

RecoveryPlan plan_recovery(const RecoveryConfig& config, const Universe& u, std::int64_t k, double r_star,
                           std::uint64_t seed) {
    RecoveryConfig eff = effective_config(config, u, k, r_star);
    Schedule s = make_schedule(eff, u, k, r_star);
    SampleBundle bundle(u, s.rounds, s.repetitions, s.bucket, Rng::derive(seed, {1}));
    return RecoveryPlan{eff, s, std::move(bundle)};
}

RecoveryPlan plan_recovery_by_projection(const RecoveryConfig& config, const Universe& u, std::int64_t k,
                                         double r_star, std::uint64_t seed) {
    Schedule s = make_schedule(config, u, k, r_star);
    s.rounds = kWarmupRounds;
    s.iterations = s.log2_r_star > static_cast<int>(kWarmupRounds)
                       ? static_cast<std::size_t>(s.log2_r_star) - kWarmupRounds + 1
                       : 1;
    SampleBundle bundle(u, s.rounds, s.repetitions, s.bucket, Rng::derive(seed, {1}));
    return RecoveryPlan{config, s, std::move(bundle)};
}

namespace {

void check_inputs(const AuditedSignal& x, std::int64_t k, double mu) {
    if (!(mu > 0.0)) throw ConfigError("recovery: mu must be positive (floor it at mu_min * ||x||_2)");
    if (k < 1) throw ConfigError("recovery: k must be >= 1");
    if (static_cast<std::size_t>(k) > x.universe().n()) throw ConfigError("recovery: k exceeds n");
}

std::vector<std::vector<MeasuredList>> measure(const AuditedSignal& x, const RecoveryPlan& plan,
                                               std::size_t& samples_used) {
    const std::size_t before = x.total_reads();
    auto rounds = measure_bundle(x, plan.bundle);
    samples_used = x.total_reads() - before;
    return rounds;
}

} // namespace

RecoveryResult fourier_sparse_recovery(const AuditedSignal& x, std::int64_t k, double mu, double r_star,
                                       const RecoveryConfig& config, std::uint64_t seed) {
    check_inputs(x, k, mu);
    const Universe& u = x.universe();
    const RecoveryPlan plan = plan_recovery(config, u, k, r_star, seed);
    const Schedule& s = plan.schedule;
    const RecoveryConfig& cfg = plan.config;

    RecoveryResult result{SparseApprox(u), {}, 0, s, cfg};
    const auto rounds = measure(x, plan, result.samples_used);
    const TensorDft dft(u);
    const int cap = cfg.max_shift_attempts_factor * std::max(1, u.ceil_log2_n());

    SparseApprox y(u);
    for (std::size_t l = 1; l <= s.iterations; ++l) {
        const double nu = s.nu(l, mu);
        const double box = std::ldexp(nu, 1 - static_cast<int>(s.rounds));
        SparseApprox z = reduce_h_rounds(y, rounds, nu, s.rounds, dft, cfg.reduce);
        SparseApprox sum = y + z;

        IterationDiag diag{nu, box, sum.size(), 0, {}};
        if (l == s.iterations) {
            result.iterations.push_back(diag);
            result.y = std::move(sum);
            return result;
        }

        std::vector<Complex> centers;
        centers.reserve(sum.size());
        for (const auto& [f, v] : sum.entries()) centers.push_back(v);

        Rng shift_rng = Rng::stream(seed, {2, l});
        ShiftDraw draw{};
        try {
            draw = draw_good_shift(centers, ShiftParams{cfg.alpha * nu, box, cfg.beta * nu}, shift_rng, cap);
        } catch (const ShiftSearchFailed& e) {
            throw ShiftSearchFailed(static_cast<int>(l), e.attempts(),
                                    "iteration " + std::to_string(l) + ": " + e.what());
        }
        diag.shift_attempts = draw.attempts;
        diag.shift = draw.shift;
        result.iterations.push_back(diag);

        SparseApprox next(u);
        const GridSpec grid{cfg.beta * nu};
        for (const auto& [f, v] : sum.entries()) next.set(f, project(v + draw.shift, grid));
        y = std::move(next);
    }
    // unreachable: the last iteration returns
    result.y = std::move(y);
    return result;
}

RecoveryResult fourier_sparse_recovery_by_projection(const AuditedSignal& x, std::int64_t k, double mu,
                                                     double r_star, const RecoveryConfig& config,
                                                     std::uint64_t seed) {
    check_inputs(x, k, mu);
    const Universe& u = x.universe();
    const RecoveryPlan plan = plan_recovery_by_projection(config, u, k, r_star, seed);
    const Schedule& s = plan.schedule;

    RecoveryResult result{SparseApprox(u), {}, 0, s, plan.config};
    const auto rounds = measure(x, plan, result.samples_used);
    const TensorDft dft(u);

    SparseApprox y(u);
    double nu = mu * static_cast<double>(s.r_star) / 2.0;
    for (;;) {
        const double target = std::ldexp(nu, 1 - static_cast<int>(s.rounds));
        SparseApprox sum = y + reduce_h_rounds(y, rounds, nu, s.rounds, dft, config.reduce);
        result.iterations.push_back(IterationDiag{nu, target, sum.size(), 0, {}});
        if (target <= mu) {
            result.y = std::move(sum);
            return result;
        }
        SparseApprox next(u);
        const GridSpec grid{kWarmupGrid * nu};
        for (const auto& [f, v] : sum.entries()) next.set(f, project(v, grid));
        y = std::move(next);
        nu /= 2.0;
    }
}

} // namespace sft

#include "sft/verify.hpp"

#include "sft/grid_shift.hpp"
#include "sft/linf_reduce.hpp"
#include "sft/rng.hpp"
#include "sft/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace sft {

namespace {

std::string describe(const char* what, double observed, const char* rel, double bound) {
    std::ostringstream os;
    os.precision(6);
    os << what << ' ' << observed << ' ' << rel << ' ' << bound;
    return os.str();
}

std::string universe_name(const Universe& u) {
    return "(" + std::to_string(u.p()) + "," + std::to_string(u.d()) + ")";
}

} // namespace

Check check_dft(const Universe& u, std::uint64_t seed, double tol) {
    const TensorDft dft(u);
    Rng rng = Rng::stream(seed, {21});
    Signal x(u);
    for (auto& v : x.values) v = {rng.normal(), rng.normal()};

    const Spectrum xhat = dft.forward(x);
    const Signal back = dft.inverse(xhat);
    double roundtrip = 0.0;
    for (std::size_t t = 0; t < u.n(); ++t) roundtrip = std::max(roundtrip, std::abs(back[t] - x[t]));

    const auto tw = dft.twiddles();
    const double scale = 1.0 / std::sqrt(static_cast<double>(u.n()));
    double direct = 0.0;
    for (std::size_t f = 0; f < u.n(); ++f) {
        Complex acc{};
        for (std::size_t t = 0; t < u.n(); ++t) acc += x[t] * tw[u.dot_mod_p(f, t)];
        direct = std::max(direct, std::abs(acc * scale - xhat[f]));
    }
    const double worst = std::max(roundtrip, direct);
    return Check{"dft " + universe_name(u), worst <= tol, worst, tol,
                 describe("round trip", roundtrip, "/ direct", direct)};
}

Check check_coefficient_zero(const Universe& u, std::size_t bucket, std::size_t draws, std::uint64_t seed) {
    Rng rng = Rng::stream(seed, {22});
    double worst = 0.0;
    for (std::size_t i = 0; i < draws; ++i) {
        const SampleList T = draw_sample_list(u, bucket, rng);
        worst = std::max(worst, std::abs(coefficient(0, T) - Complex{1.0, 0.0}));
    }
    return Check{"coefficient c_0 = 1", worst <= 1e-12, worst, 1e-12, describe("max |c_0 - 1|", worst, "<=", 1e-12)};
}

Check check_coefficient_moment(const Universe& u, std::size_t f, std::size_t bucket, std::size_t draws,
                               std::uint64_t seed) {
    Rng rng = Rng::stream(seed, {23, f});
    std::vector<double> sq(draws);
    for (auto& s : sq) s = std::norm(coefficient(f, draw_sample_list(u, bucket, rng)));
    double mean = 0.0;
    for (double s : sq) mean += s;
    mean /= static_cast<double>(draws);
    double var = 0.0;
    for (double s : sq) var += (s - mean) * (s - mean);
    var /= static_cast<double>(draws - 1);
    const double expected = 1.0 / static_cast<double>(bucket);
    const double gap = std::abs(mean - expected);
    const double band = 3.0 * std::sqrt(var) / std::sqrt(static_cast<double>(draws));
    return Check{"E|c_f|^2 = 1/B, f=" + std::to_string(f), gap <= band, gap, band,
                 describe("mean", mean, "vs", expected)};
}

Check check_noise_bound(const Universe& u, std::size_t bucket, std::size_t trials, double max_rate,
                        std::uint64_t seed) {
    Rng rng = Rng::stream(seed, {24});
    Spectrum xhat(u);
    for (auto& v : xhat.values) v = {rng.normal(), rng.normal()};
    std::vector<std::size_t> V;
    for (std::size_t g = 1; g < u.n(); ++g) V.push_back(g);
    const double rate = noise_bound_check(xhat, 0, V, bucket, trials, rng);
    return Check{"noise bound 10/sqrt(B)", rate <= max_rate, rate, max_rate,
                 describe("exceedance rate", rate, "<=", max_rate)};
}

Check check_random_shift(double ratio, std::size_t draws, std::uint64_t seed) {
    Rng rng = Rng::stream(seed, {25, static_cast<std::uint64_t>(ratio * 1e6)});
    const double r_s = 1.0;
    const GridSpec grid{2.0 * r_s};
    const Complex center{rng.uniform(-10.0, 10.0), rng.uniform(-10.0, 10.0)};
    std::size_t good = 0;
    for (std::size_t i = 0; i < draws; ++i) {
        const Complex s{rng.uniform(-r_s, r_s), rng.uniform(-r_s, r_s)};
        if (box_projects_uniquely(Box{center + s, ratio * r_s}, grid)) ++good;
    }
    const double rate = static_cast<double>(good) / static_cast<double>(draws);
    const double q = (1.0 - ratio) * (1.0 - ratio);
    const double floor = q - 3.0 * std::sqrt(q * (1.0 - q) / static_cast<double>(draws));
    std::ostringstream name;
    name << "random shift r_b/r_s=" << ratio;
    return Check{name.str(), rate >= floor, rate, floor, describe("rate", rate, ">=", floor)};
}

HalvingOutcome halving_experiment(const SignalSpec& signal, const RecoveryConfig& config, std::size_t trials,
                                  std::uint64_t seed) {
    config.validate();
    HalvingOutcome out;
    out.trials = trials;
    const Universe u(signal.p, signal.d);
    const TensorDft dft(u);
    const std::size_t bucket = static_cast<std::size_t>(config.c_b * signal.k);
    const std::size_t reps = static_cast<std::size_t>(config.c_r * std::max(1, u.ceil_log2_n()));

    for (std::size_t i = 0; i < trials; ++i) {
        SignalSpec spec = signal;
        spec.seed = Rng::derive(seed, {i, 0});
        GeneratedSignal gen = gen_signal(spec);
        const OracleResult oracle = oracle_top_k(gen.x, spec.k, config.mu_min);
        Rng rng = Rng::stream(seed, {i, 1});

        const int j = 1 + static_cast<int>(rng.below(6));
        const double nu = std::max(std::ldexp(linf_norm(oracle.xhat.values), -j), oracle.mu_floor);

        SparseApprox y(u);
        for (const auto& [f, v] : oracle.top.entries()) {
            const double r = rng.uniform(0.0, 0.99 * 2.0 * nu);
            y.set(f, v + std::polar(r, rng.uniform(0.0, 2.0 * std::numbers::pi)));
        }
        double before = 0.0;
        for (std::size_t f = 0; f < u.n(); ++f) before = std::max(before, std::abs(oracle.xhat[f] - y.get(f)));
        if (before > 2.0 * nu) continue;
        ++out.admitted;

        const SampleBundle bundle(u, 1, reps, bucket, Rng::derive(seed, {i, 2}));
        const auto points = bundle.all_points();
        const AuditedSignal audited(std::move(gen.x), points);
        const auto rounds = measure_bundle(audited, bundle);
        const ReduceOutput reduced = linfinity_reduce(ReduceInput{y, rounds[0], nu}, dft, config.reduce);

        double after = 0.0;
        for (std::size_t f = 0; f < u.n(); ++f)
            after = std::max(after, std::abs(oracle.xhat[f] - y.get(f) - reduced.z.get(f)));
        if (after <= nu) ++out.successes;
    }
    return out;
}

std::vector<Check> lemma_suite(std::uint64_t seed) {
    std::vector<Check> out;
    for (auto [p, d] : {std::pair{2, 10}, {3, 7}, {6, 4}, {16, 3}, {1024, 1}})
        out.push_back(check_dft(Universe(p, d), seed));

    const Universe u(16, 3);
    out.push_back(check_coefficient_zero(u, 64, 1000, seed));
    for (std::size_t f : {1, 17, 273, 1000, 4095}) out.push_back(check_coefficient_moment(u, f, 64, 10'000, seed));
    out.push_back(check_noise_bound(Universe(64, 1), 32, 10'000, 0.02, seed));
    for (double ratio : {0.5, 0.1, 0.01}) out.push_back(check_random_shift(ratio, 10'000, seed));

    SignalSpec spec;
    spec.sigma = sigma_for_ratio(4096, spec.k, 1.0, 256.0);
    const HalvingOutcome h = halving_experiment(spec, RecoveryConfig::desk(), 100, seed);
    const double rate = h.trials ? static_cast<double>(h.successes) / static_cast<double>(h.trials) : 0.0;
    out.push_back(Check{"linf reduce halving (desk)", h.admitted == h.trials && rate >= 0.9, rate, 0.9,
                        std::to_string(h.successes) + "/" + std::to_string(h.trials) + " halved, " +
                            std::to_string(h.admitted) + " admitted"});
    return out;
}

} // namespace sft

#include "sft/harness.hpp"

#include "sft/errors.hpp"
#include "sft/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>

namespace sft {

using json = nlohmann::json;

double MagnitudeModel::magnitude(std::size_t i) const {
    switch (kind) {
    case Kind::equal: return scale;
    case Kind::geometric: return scale * std::pow(ratio, static_cast<double>(i));
    case Kind::list: return values.at(i);
    }
    return scale;
}

void SignalSpec::validate() const {
    const Universe u(p, d);
    if (k < 1) throw ConfigError("signal: k must be >= 1");
    if (static_cast<std::size_t>(k) > u.n())
        throw ConfigError("signal: k = " + std::to_string(k) + " exceeds n = " + std::to_string(u.n()));
    if (!(sigma >= 0.0)) throw ConfigError("signal: sigma must be >= 0");
    if (magnitude.kind == MagnitudeModel::Kind::list && magnitude.values.size() != static_cast<std::size_t>(k))
        throw ConfigError("signal: explicit magnitude list must have k entries");
}

GeneratedSignal gen_signal(const SignalSpec& spec) {
    spec.validate();
    const Universe u(spec.p, spec.d);
    const std::size_t n = u.n();
    const auto k = static_cast<std::size_t>(spec.k);

    // Floyd's sampling of k distinct frequencies.
    Rng support_rng = Rng::stream(spec.seed, {11});
    std::set<std::size_t> chosen;
    for (std::size_t j = n - k; j < n; ++j) {
        const std::size_t t = support_rng.below(j + 1);
        if (!chosen.insert(t).second) chosen.insert(j);
    }
    std::vector<std::size_t> planted(chosen.begin(), chosen.end());

    // Magnitudes are assigned in a random order so a geometric profile does
    // not correlate with frequency position.
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), support_rng.engine());

    Spectrum truth(u);
    Rng phase_rng = Rng::stream(spec.seed, {12});
    for (std::size_t i = 0; i < k; ++i) {
        const double phase = phase_rng.uniform(0.0, 2.0 * std::numbers::pi);
        truth[planted[i]] = std::polar(spec.magnitude.magnitude(order[i]), phase);
    }
    if (spec.sigma > 0.0) {
        Rng noise_rng = Rng::stream(spec.seed, {13});
        const double s = spec.sigma / std::sqrt(2.0);
        for (auto& v : truth.values) v += Complex{noise_rng.normal(0.0, s), noise_rng.normal(0.0, s)};
    }
    Signal x = TensorDft(u).inverse(truth);
    return GeneratedSignal{std::move(x), std::move(truth), std::move(planted)};
}

double sigma_for_ratio(std::int64_t n, std::int64_t k, double scale, double ratio) {
    const double tail = static_cast<double>(n - k) / static_cast<double>(k);
    return scale / (ratio * std::sqrt(tail));
}

OracleResult oracle_top_k(const Signal& x, std::int64_t k, double mu_min) {
    const Universe& u = x.universe;
    if (k < 1 || static_cast<std::size_t>(k) > u.n()) throw ConfigError("oracle: k must be in [1, n]");
    OracleResult out{TensorDft(u).forward(x), SparseApprox(u)};

    std::vector<std::size_t> idx(u.n());
    std::iota(idx.begin(), idx.end(), 0);
    const auto kk = static_cast<std::size_t>(k);
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(kk), idx.end(),
                      [&](std::size_t a, std::size_t b) {
                          const double ma = std::abs(out.xhat[a]);
                          const double mb = std::abs(out.xhat[b]);
                          return ma != mb ? ma > mb : a < b;
                      });
    double tail = 0.0;
    for (std::size_t i = kk; i < idx.size(); ++i) tail += std::norm(out.xhat[idx[i]]);
    for (std::size_t i = 0; i < kk; ++i) out.top.set(idx[i], out.xhat[idx[i]]);

    out.mu = std::sqrt(tail) / std::sqrt(static_cast<double>(k));
    out.mu_floor = std::max({out.mu, mu_min * l2_norm(x.values), std::numeric_limits<double>::min()});
    out.r_star = round_up_pow2(linf_norm(out.xhat.values) / out.mu_floor);
    return out;
}

std::string to_string(Algorithm a) { return a == Algorithm::main ? "main" : "warmup"; }

Algorithm algorithm_from_string(const std::string& s) {
    if (s == "main") return Algorithm::main;
    if (s == "warmup") return Algorithm::warmup;
    throw ConfigError("unknown algorithm '" + s + "' (expected main or warmup)");
}

ReportFormat format_from_string(const std::string& s) {
    if (s == "json") return ReportFormat::json;
    if (s == "csv") return ReportFormat::csv;
    throw ConfigError("unknown report format '" + s + "' (expected json or csv)");
}

namespace {

Metrics run_trial(const ExperimentConfig& cfg, std::size_t trial) {
    using clock = std::chrono::steady_clock;
    Metrics m;
    m.trial = trial;
    m.seed = Rng::derive(cfg.signal.seed, {trial});

    SignalSpec spec = cfg.signal;
    spec.seed = Rng::derive(m.seed, {0});
    const std::uint64_t run_seed = Rng::derive(m.seed, {1});
    const std::int64_t k = spec.k;

    GeneratedSignal gen = gen_signal(spec);
    const Universe u = gen.x.universe;
    const OracleResult oracle = oracle_top_k(gen.x, k, cfg.recovery.mu_min);
    const auto r_star = static_cast<double>(oracle.r_star);

    const RecoveryPlan plan = cfg.algorithm == Algorithm::main
                                  ? plan_recovery(cfg.recovery, u, k, r_star, run_seed)
                                  : plan_recovery_by_projection(cfg.recovery, u, k, r_star, run_seed);
    const std::vector<std::size_t> declared = plan.bundle.all_points();
    AuditedSignal audited(std::move(gen.x), declared);

    const auto start = clock::now();
    std::optional<RecoveryResult> result;
    try {
        result = cfg.algorithm == Algorithm::main
                     ? fourier_sparse_recovery(audited, k, oracle.mu_floor, r_star, cfg.recovery, run_seed)
                     : fourier_sparse_recovery_by_projection(audited, k, oracle.mu_floor, r_star, cfg.recovery,
                                                             run_seed);
    } catch (const ShiftSearchFailed&) {
        m.shift_failed = true;
    }
    m.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - start).count();

    const std::set<std::size_t> distinct(declared.begin(), declared.end());
    if (audited.total_reads() != plan.schedule.total_samples() || audited.distinct_reads() != distinct.size())
        throw AuditViolation(std::numeric_limits<std::size_t>::max(),
                             "audit violation: trial " + std::to_string(trial) + " read " +
                                 std::to_string(audited.total_reads()) + " samples (" +
                                 std::to_string(audited.distinct_reads()) + " distinct), declared " +
                                 std::to_string(plan.schedule.total_samples()) + " (" +
                                 std::to_string(distinct.size()) + " distinct)");

    m.mu = oracle.mu;
    m.noise_floor = oracle.mu_floor;
    m.r_star = oracle.r_star;
    m.samples_used = audited.total_reads();
    m.distinct_samples = audited.distinct_reads();

    const SparseApprox y = result ? result->y : SparseApprox(u);
    if (result) {
        m.iterations = result->iterations.size();
        for (const auto& it : result->iterations) {
            if (it.shift_attempts == 0) continue;
            ++m.shift_iterations;
            m.attempts_total += it.shift_attempts;
            m.attempts_max = std::max(m.attempts_max, it.shift_attempts);
        }
    }

    double err = 0.0;
    for (std::size_t f = 0; f < u.n(); ++f) err = std::max(err, std::abs(oracle.xhat[f] - y.get(f)));
    m.linf_error = err;
    m.guarantee_ok = !m.shift_failed && m.linf_error <= m.noise_floor;

    // top-k of y, ties by lower index
    std::vector<std::pair<std::size_t, Complex>> ys(y.entries().begin(), y.entries().end());
    std::stable_sort(ys.begin(), ys.end(),
                     [](const auto& a, const auto& b) { return std::abs(a.second) > std::abs(b.second); });
    if (ys.size() > static_cast<std::size_t>(k)) ys.resize(static_cast<std::size_t>(k));
    Spectrum diff = oracle.xhat;
    for (const auto& [f, v] : ys) diff[f] -= v;
    m.l2l2_after_topk = l2_norm(diff.values) / (std::sqrt(static_cast<double>(k)) * m.noise_floor);

    std::size_t hits = 0;
    for (const auto& [f, v] : y.entries())
        if (oracle.top.entries().count(f)) ++hits;
    m.support_size = y.size();
    m.support_precision = y.empty() ? 1.0 : static_cast<double>(hits) / static_cast<double>(y.size());
    m.support_recall = static_cast<double>(hits) / static_cast<double>(k);
    return m;
}

} // namespace

Aggregates aggregate(const std::vector<Metrics>& trials) {
    Aggregates a;
    a.trials = trials.size();
    std::vector<double> attempts;
    double err_sum = 0.0;
    for (const auto& m : trials) {
        if (m.guarantee_ok) ++a.successes;
        if (m.shift_failed) ++a.shift_failures;
        err_sum += m.linf_error;
        a.shift_iterations += m.shift_iterations;
        a.max_attempts = std::max(a.max_attempts, m.attempts_max);
        a.sample_budget = std::max(a.sample_budget, m.samples_used);
        if (m.shift_iterations > 0)
            attempts.push_back(static_cast<double>(m.attempts_total) / static_cast<double>(m.shift_iterations));
    }
    if (a.trials > 0) {
        a.success_rate = static_cast<double>(a.successes) / static_cast<double>(a.trials);
        a.mean_linf_error = err_sum / static_cast<double>(a.trials);
    }
    std::size_t total_attempts = 0;
    for (const auto& m : trials) total_attempts += static_cast<std::size_t>(m.attempts_total);
    if (a.shift_iterations > 0)
        a.mean_attempts_per_iteration = static_cast<double>(total_attempts) / static_cast<double>(a.shift_iterations);
    if (!attempts.empty()) {
        std::sort(attempts.begin(), attempts.end());
        const std::size_t mid = attempts.size() / 2;
        a.median_attempts_per_iteration =
            attempts.size() % 2 ? attempts[mid] : 0.5 * (attempts[mid - 1] + attempts[mid]);
    }
    return a;
}

Report run_experiment(const ExperimentConfig& config) {
    if (config.trials == 0) throw ConfigError("experiment: trials must be >= 1");
    config.signal.validate();
    config.recovery.validate();
    Report report;
    report.config = config;
    report.trials.reserve(config.trials);
    for (std::size_t i = 0; i < config.trials; ++i) report.trials.push_back(run_trial(config, i));
    report.aggregates = aggregate(report.trials);
    return report;
}

// ---- serialization ----

namespace {

std::string kind_name(MagnitudeModel::Kind k) {
    switch (k) {
    case MagnitudeModel::Kind::equal: return "equal";
    case MagnitudeModel::Kind::geometric: return "geometric";
    case MagnitudeModel::Kind::list: return "list";
    }
    return "equal";
}

MagnitudeModel::Kind kind_from(const std::string& s) {
    if (s == "equal") return MagnitudeModel::Kind::equal;
    if (s == "geometric") return MagnitudeModel::Kind::geometric;
    if (s == "list") return MagnitudeModel::Kind::list;
    throw ConfigError("unknown magnitude model '" + s + "'");
}

json config_to_json(const ExperimentConfig& c) {
    const auto& s = c.signal;
    const auto& r = c.recovery;
    return json{
        {"signal",
         {{"p", s.p},
          {"d", s.d},
          {"k", s.k},
          {"magnitude",
           {{"model", kind_name(s.magnitude.kind)},
            {"scale", s.magnitude.scale},
            {"ratio", s.magnitude.ratio},
            {"values", s.magnitude.values}}},
          {"sigma", s.sigma},
          {"seed", s.seed}}},
        {"recovery",
         {{"C_B", r.c_b},
          {"C_R", r.c_r},
          {"C_H", r.c_h},
          {"alpha", r.alpha},
          {"beta", r.beta},
          {"C_S", r.c_s},
          {"mu_min", r.mu_min},
          {"max_shift_attempts_factor", r.max_shift_attempts_factor},
          {"dense_residual", r.reduce.dense_residual}}},
        {"trials", c.trials},
        {"algorithm", to_string(c.algorithm)},
    };
}

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig c;
    const auto& s = j.at("signal");
    c.signal.p = s.at("p").get<std::int64_t>();
    c.signal.d = s.at("d").get<std::int64_t>();
    c.signal.k = s.at("k").get<std::int64_t>();
    const auto& mag = s.at("magnitude");
    c.signal.magnitude.kind = kind_from(mag.at("model").get<std::string>());
    c.signal.magnitude.scale = mag.at("scale").get<double>();
    c.signal.magnitude.ratio = mag.at("ratio").get<double>();
    c.signal.magnitude.values = mag.at("values").get<std::vector<double>>();
    c.signal.sigma = s.at("sigma").get<double>();
    c.signal.seed = s.at("seed").get<std::uint64_t>();
    const auto& r = j.at("recovery");
    c.recovery.c_b = r.at("C_B").get<std::int64_t>();
    c.recovery.c_r = r.at("C_R").get<std::int64_t>();
    c.recovery.c_h = r.at("C_H").get<std::int64_t>();
    c.recovery.alpha = r.at("alpha").get<double>();
    c.recovery.beta = r.at("beta").get<double>();
    c.recovery.c_s = r.at("C_S").get<std::int64_t>();
    c.recovery.mu_min = r.at("mu_min").get<double>();
    c.recovery.max_shift_attempts_factor = r.at("max_shift_attempts_factor").get<int>();
    c.recovery.reduce.dense_residual = r.at("dense_residual").get<bool>();
    c.trials = j.at("trials").get<std::size_t>();
    c.algorithm = algorithm_from_string(j.at("algorithm").get<std::string>());
    return c;
}

json metrics_to_json(const Metrics& m) {
    return json{{"trial", m.trial},
                {"seed", m.seed},
                {"linf_error", m.linf_error},
                {"mu", m.mu},
                {"noise_floor", m.noise_floor},
                {"guarantee_ok", m.guarantee_ok},
                {"l2l2_after_topk", m.l2l2_after_topk},
                {"support_precision", m.support_precision},
                {"support_recall", m.support_recall},
                {"support_size", m.support_size},
                {"samples_used", m.samples_used},
                {"distinct_samples", m.distinct_samples},
                {"r_star", m.r_star},
                {"iterations", m.iterations},
                {"shift_iterations", m.shift_iterations},
                {"attempts_total", m.attempts_total},
                {"attempts_max", m.attempts_max},
                {"shift_failed", m.shift_failed},
                {"wall_ms", m.wall_ms}};
}

Metrics metrics_from_json(const json& j) {
    Metrics m;
    m.trial = j.at("trial").get<std::size_t>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.linf_error = j.at("linf_error").get<double>();
    m.mu = j.at("mu").get<double>();
    m.noise_floor = j.at("noise_floor").get<double>();
    m.guarantee_ok = j.at("guarantee_ok").get<bool>();
    m.l2l2_after_topk = j.at("l2l2_after_topk").get<double>();
    m.support_precision = j.at("support_precision").get<double>();
    m.support_recall = j.at("support_recall").get<double>();
    m.support_size = j.at("support_size").get<std::size_t>();
    m.samples_used = j.at("samples_used").get<std::size_t>();
    m.distinct_samples = j.at("distinct_samples").get<std::size_t>();
    m.r_star = j.at("r_star").get<std::uint64_t>();
    m.iterations = j.at("iterations").get<std::size_t>();
    m.shift_iterations = j.at("shift_iterations").get<std::size_t>();
    m.attempts_total = j.at("attempts_total").get<int>();
    m.attempts_max = j.at("attempts_max").get<int>();
    m.shift_failed = j.at("shift_failed").get<bool>();
    m.wall_ms = j.at("wall_ms").get<double>();
    return m;
}

json aggregates_to_json(const Aggregates& a) {
    return json{{"trials", a.trials},
                {"successes", a.successes},
                {"success_rate", a.success_rate},
                {"mean_linf_error", a.mean_linf_error},
                {"shift_iterations", a.shift_iterations},
                {"mean_attempts_per_iteration", a.mean_attempts_per_iteration},
                {"median_attempts_per_iteration", a.median_attempts_per_iteration},
                {"max_attempts", a.max_attempts},
                {"sample_budget", a.sample_budget},
                {"shift_failures", a.shift_failures}};
}

Aggregates aggregates_from_json(const json& j) {
    Aggregates a;
    a.trials = j.at("trials").get<std::size_t>();
    a.successes = j.at("successes").get<std::size_t>();
    a.success_rate = j.at("success_rate").get<double>();
    a.mean_linf_error = j.at("mean_linf_error").get<double>();
    a.shift_iterations = j.at("shift_iterations").get<std::size_t>();
    a.mean_attempts_per_iteration = j.at("mean_attempts_per_iteration").get<double>();
    a.median_attempts_per_iteration = j.at("median_attempts_per_iteration").get<double>();
    a.max_attempts = j.at("max_attempts").get<int>();
    a.sample_budget = j.at("sample_budget").get<std::size_t>();
    a.shift_failures = j.at("shift_failures").get<std::size_t>();
    return a;
}

} // namespace

std::string report_to_json(const Report& report) {
    json trials = json::array();
    for (const auto& m : report.trials) trials.push_back(metrics_to_json(m));
    const json j{{"schema_version", report.schema_version},
                 {"config", config_to_json(report.config)},
                 {"trials", trials},
                 {"aggregates", aggregates_to_json(report.aggregates)}};
    return j.dump(2) + "\n";
}

Report report_from_json(const std::string& text) {
    const json j = json::parse(text);
    Report r;
    r.schema_version = j.at("schema_version").get<std::string>();
    if (r.schema_version != "1") throw std::runtime_error("report: unsupported schema_version " + r.schema_version);
    r.config = config_from_json(j.at("config"));
    for (const auto& t : j.at("trials")) r.trials.push_back(metrics_from_json(t));
    r.aggregates = aggregates_from_json(j.at("aggregates"));
    return r;
}

std::string report_to_csv(const Report& report) {
    std::ostringstream os;
    os.precision(17);
    os << "seed,linf_error,guarantee_ok,samples_used,wall_ms,attempts_total\n";
    for (const auto& m : report.trials)
        os << m.seed << ',' << m.linf_error << ',' << (m.guarantee_ok ? "true" : "false") << ',' << m.samples_used
           << ',' << m.wall_ms << ',' << m.attempts_total << '\n';
    return os.str();
}

void emit_report(const Report& report, ReportFormat format, const std::filesystem::path& path) {
    if (report.trials.empty()) throw std::invalid_argument("emit_report: report has no trials");
    const std::string body = format == ReportFormat::json ? report_to_json(report) : report_to_csv(report);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open report file '" + path.string() + "' for writing");
    out << body;
    out.flush();
    if (!out) throw std::runtime_error("failed writing report file '" + path.string() + "'");
}

bool operator==(const Metrics& a, const Metrics& b) {
    return a.trial == b.trial && a.seed == b.seed && a.linf_error == b.linf_error && a.mu == b.mu &&
           a.noise_floor == b.noise_floor && a.guarantee_ok == b.guarantee_ok &&
           a.l2l2_after_topk == b.l2l2_after_topk && a.support_precision == b.support_precision &&
           a.support_recall == b.support_recall && a.support_size == b.support_size &&
           a.samples_used == b.samples_used && a.distinct_samples == b.distinct_samples && a.r_star == b.r_star &&
           a.iterations == b.iterations && a.shift_iterations == b.shift_iterations &&
           a.attempts_total == b.attempts_total && a.attempts_max == b.attempts_max &&
           a.shift_failed == b.shift_failed && a.wall_ms == b.wall_ms;
}

namespace {
bool same(const Aggregates& a, const Aggregates& b) {
    return a.trials == b.trials && a.successes == b.successes && a.success_rate == b.success_rate &&
           a.mean_linf_error == b.mean_linf_error && a.shift_iterations == b.shift_iterations &&
           a.mean_attempts_per_iteration == b.mean_attempts_per_iteration &&
           a.median_attempts_per_iteration == b.median_attempts_per_iteration && a.max_attempts == b.max_attempts &&
           a.sample_budget == b.sample_budget && a.shift_failures == b.shift_failures;
}
bool same(const ExperimentConfig& a, const ExperimentConfig& b) {
    return a.signal == b.signal && a.recovery == b.recovery && a.trials == b.trials && a.algorithm == b.algorithm;
}
} // namespace

bool operator==(const Report& a, const Report& b) {
    return a.schema_version == b.schema_version && same(a.config, b.config) && a.trials == b.trials &&
           same(a.aggregates, b.aggregates);
}

} // namespace sft

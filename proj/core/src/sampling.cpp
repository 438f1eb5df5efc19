#include "sft/sampling.hpp"

#include "sft/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace sft {

SampleList::SampleList(Universe u, std::vector<std::size_t> points) : universe_(u), points_(std::move(points)) {
    if (points_.empty()) throw std::invalid_argument("sample list: must contain at least one point");
    for (auto t : points_)
        if (t >= universe_.n())
            throw std::out_of_range("sample list: point " + std::to_string(t) + " outside universe");
}

SampleList draw_sample_list(const Universe& u, std::size_t count, Rng& rng) {
    if (count == 0) throw std::invalid_argument("draw_sample_list: B must be >= 1");
    std::vector<std::size_t> pts(count);
    for (auto& t : pts) {
        std::size_t flat = 0;
        std::size_t stride = 1;
        for (std::size_t i = 0; i < u.d(); ++i) {
            flat += static_cast<std::size_t>(rng.below(u.p())) * stride;
            stride *= u.p();
        }
        t = flat;
    }
    return SampleList(u, std::move(pts));
}

SampleBundle::SampleBundle(Universe u, std::size_t rounds, std::size_t repetitions, std::size_t bucket,
                           std::uint64_t seed)
    : universe_(u), rounds_(rounds), repetitions_(repetitions), bucket_(bucket) {
    if (rounds == 0 || repetitions == 0 || bucket == 0)
        throw ConfigError("sample bundle: H, R and B must all be >= 1");
    lists_.reserve(rounds * repetitions);
    for (std::size_t h = 0; h < rounds; ++h) {
        for (std::size_t r = 0; r < repetitions; ++r) {
            Rng rng = Rng::stream(seed, {0x5a4d'504cULL, h, r});
            lists_.push_back(draw_sample_list(u, bucket, rng));
        }
    }
}

std::vector<std::size_t> SampleBundle::all_points() const {
    std::vector<std::size_t> out;
    out.reserve(total_points());
    for (const auto& l : lists_) out.insert(out.end(), l.points().begin(), l.points().end());
    return out;
}

namespace {
std::vector<Complex> positive_twiddles(std::size_t p) {
    std::vector<Complex> tw(p);
    for (std::size_t j = 0; j < p; ++j) {
        const double theta = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(p);
        tw[j] = {std::cos(theta), std::sin(theta)};
    }
    return tw;
}
} // namespace

Complex coefficient(std::size_t f, const SampleList& T) {
    const Universe& u = T.universe();
    if (f >= u.n()) throw std::out_of_range("coefficient: frequency outside universe");
    if (f == 0) return {1.0, 0.0};
    const auto tw = positive_twiddles(u.p());
    Complex acc{};
    for (auto t : T.points()) acc += tw[u.dot_mod_p(f, t)];
    return acc / static_cast<double>(T.size());
}

Complex subset_transform_single(std::span<const Complex> samples, const SampleList& T, std::size_t f) {
    const Universe& u = T.universe();
    if (samples.size() != T.size())
        throw std::invalid_argument("subset_transform_single: " + std::to_string(samples.size()) + " samples for " +
                                    std::to_string(T.size()) + " points");
    if (f >= u.n()) throw std::out_of_range("subset_transform_single: frequency outside universe");
    const auto tw = positive_twiddles(u.p());
    Complex acc{};
    const auto pts = T.points();
    for (std::size_t i = 0; i < pts.size(); ++i) acc += tw[u.dot_mod_p(f, pts[i])] * samples[i];
    return acc * (std::sqrt(static_cast<double>(u.n())) / static_cast<double>(T.size()));
}

void subset_transform_dense_into(std::span<const Complex> samples, const SampleList& T, const TensorDft& dft,
                                 std::span<Complex> out) {
    const Universe& u = T.universe();
    if (!(dft.universe() == u)) throw std::invalid_argument("subset_transform_dense: universe mismatch");
    if (samples.size() != T.size()) throw std::invalid_argument("subset_transform_dense: length mismatch");
    if (out.size() != u.n()) throw std::invalid_argument("subset_transform_dense: output length mismatch");
    std::fill(out.begin(), out.end(), Complex{});
    const auto pts = T.points();
    for (std::size_t i = 0; i < pts.size(); ++i) out[pts[i]] += samples[i];
    dft.forward_inplace(out);
    const double scale = static_cast<double>(u.n()) / static_cast<double>(T.size());
    for (auto& v : out) v *= scale;
}

Spectrum subset_transform_dense(std::span<const Complex> samples, const SampleList& T, const TensorDft& dft) {
    Spectrum out(T.universe());
    subset_transform_dense_into(samples, T, dft, out.values);
    return out;
}

double noise_bound_check(const Spectrum& xhat, std::size_t f, std::span<const std::size_t> V, std::size_t bucket,
                         std::size_t trials, Rng& rng) {
    const Universe& u = xhat.universe;
    if (trials == 0) throw std::invalid_argument("noise_bound_check: trials must be >= 1");
    if (bucket == 0) throw std::invalid_argument("noise_bound_check: B must be >= 1");
    Spectrum restricted(u);
    for (auto g : V) {
        if (g == f) throw std::invalid_argument("noise_bound_check: f must not belong to V");
        if (g >= u.n()) throw std::out_of_range("noise_bound_check: V contains an index outside the universe");
        restricted[g] = xhat[g];
    }
    const double energy = l2_norm(restricted.values);
    if (energy == 0.0) return 0.0;
    const double bound = 10.0 / std::sqrt(static_cast<double>(bucket)) * energy;

    // sum_{f' in V} c_{f-f'} xhat_{f'} is the subset estimate of xhat_V at f,
    // so it only needs the time-domain values of xhat_V at the sampled points.
    const Signal w = TensorDft(u).inverse(restricted);
    std::size_t exceeded = 0;
    for (std::size_t trial = 0; trial < trials; ++trial) {
        const SampleList T = draw_sample_list(u, bucket, rng);
        std::vector<Complex> vals(T.size());
        for (std::size_t i = 0; i < T.size(); ++i) vals[i] = w[T.points()[i]];
        if (std::abs(subset_transform_single(vals, T, f)) >= bound) ++exceeded;
    }
    return static_cast<double>(exceeded) / static_cast<double>(trials);
}

AuditedSignal::AuditedSignal(Signal x, std::span<const std::size_t> allowed)
    : signal_(std::move(x)),
      allowed_(signal_.universe.n(), 0),
      touched_(std::make_unique<std::atomic<std::uint8_t>[]>(signal_.universe.n())) {
    allow(allowed);
}

void AuditedSignal::allow(std::span<const std::size_t> points) {
    for (auto t : points) {
        if (t >= allowed_.size()) throw std::out_of_range("audited signal: allowed point outside universe");
        allowed_[t] = 1;
    }
}

Complex AuditedSignal::read(std::size_t t) const {
    if (t >= allowed_.size() || allowed_[t] == 0)
        throw AuditViolation(t, "audit violation: time point " + std::to_string(t) + " is not in the declared bundle");
    total_.fetch_add(1);
    if (touched_[t].exchange(1) == 0) distinct_.fetch_add(1);
    return signal_.values[t];
}

std::vector<Complex> AuditedSignal::measure(const SampleList& T) const {
    if (!(T.universe() == universe())) throw std::invalid_argument("measure: universe mismatch");
    std::vector<Complex> out(T.size());
    for (std::size_t i = 0; i < T.size(); ++i) out[i] = read(T.points()[i]);
    return out;
}

} // namespace sft

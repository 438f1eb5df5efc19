#include "sft/linf_reduce.hpp"

#include "sft/errors.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>

namespace sft {

unsigned worker_count() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("SFT_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(std::min<long>(v, 256));
    }
    return hw;
}

double lower_median(std::span<double> v) {
    if (v.empty()) throw std::invalid_argument("lower_median: empty input");
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>((v.size() - 1) / 2);
    std::nth_element(v.begin(), mid, v.end());
    return *mid;
}

std::vector<std::vector<MeasuredList>> measure_bundle(const AuditedSignal& x, const SampleBundle& bundle) {
    if (!(bundle.universe() == x.universe())) throw std::invalid_argument("measure_bundle: universe mismatch");
    std::vector<std::vector<MeasuredList>> out(bundle.rounds());
    for (std::size_t h = 0; h < bundle.rounds(); ++h) {
        out[h].reserve(bundle.repetitions());
        for (std::size_t r = 0; r < bundle.repetitions(); ++r) {
            const SampleList& T = bundle.list(h, r);
            out[h].push_back(MeasuredList{T, x.measure(T)});
        }
    }
    return out;
}

namespace {

template <class Fn>
void parallel_for(std::size_t count, Fn&& fn) {
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(worker_count(), count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < count; i += workers) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace

ReduceOutput linfinity_reduce(const ReduceInput& in, const TensorDft& dft, const ReduceOptions& opts) {
    const Universe& u = dft.universe();
    if (in.lists.empty()) throw std::invalid_argument("linfinity_reduce: no sample lists");
    if (!(in.nu > 0.0)) throw std::invalid_argument("linfinity_reduce: nu must be positive");
    if (!(in.y.universe() == u)) throw std::invalid_argument("linfinity_reduce: y universe mismatch");
    for (const auto& m : in.lists) {
        if (!(m.points.universe() == u)) throw std::invalid_argument("linfinity_reduce: sample list universe mismatch");
        if (m.values.size() != m.points.size())
            throw std::invalid_argument("linfinity_reduce: values do not match sample list");
    }

    const std::size_t n = u.n();
    const std::size_t R = in.lists.size();

    std::optional<Signal> w_dense;
    if (opts.dense_residual && !in.y.empty()) w_dense = dft.inverse(in.y.densify());

    // One row of n estimates per repetition; medians are taken over columns
    // in blocks so the gathers stay in cache.
    std::vector<Complex> rows(R * n);

    parallel_for(R, [&](std::size_t r) {
        const MeasuredList& m = in.lists[r];
        const auto pts = m.points.points();
        std::vector<Complex> residual(m.values);
        if (w_dense) {
            for (std::size_t i = 0; i < pts.size(); ++i) residual[i] -= (*w_dense)[pts[i]];
        } else if (!in.y.empty()) {
            const auto w = sparse_eval_time(in.y, pts);
            for (std::size_t i = 0; i < pts.size(); ++i) residual[i] -= w[i];
        }
        subset_transform_dense_into(residual, m.points, dft, std::span(rows).subspan(r * n, n));
    });

    ReduceOutput out{SparseApprox(u), std::nullopt};
    if (opts.keep_medians) out.medians.emplace(u);
    const double threshold = in.nu / 2.0;
    constexpr std::size_t kBlock = 64;
    std::vector<double> re(kBlock * R);
    std::vector<double> im(kBlock * R);
    for (std::size_t f0 = 0; f0 < n; f0 += kBlock) {
        const std::size_t width = std::min(kBlock, n - f0);
        for (std::size_t r = 0; r < R; ++r) {
            const Complex* row = rows.data() + r * n + f0;
            for (std::size_t j = 0; j < width; ++j) {
                re[j * R + r] = row[j].real();
                im[j * R + r] = row[j].imag();
            }
        }
        for (std::size_t j = 0; j < width; ++j) {
            const std::size_t f = f0 + j;
            const Complex eta{lower_median(std::span(re).subspan(j * R, R)),
                              lower_median(std::span(im).subspan(j * R, R))};
            if (out.medians) (*out.medians)[f] = eta;
            if (std::abs(eta) >= threshold) out.z.set(f, eta);
        }
    }
    return out;
}

SparseApprox reduce_h_rounds(const SparseApprox& y, std::span<const std::vector<MeasuredList>> rounds, double nu,
                             std::size_t H, const TensorDft& dft, const ReduceOptions& opts) {
    if (H == 0) throw std::invalid_argument("reduce_h_rounds: H must be >= 1");
    if (rounds.size() < H)
        throw std::invalid_argument("reduce_h_rounds: need " + std::to_string(H) + " rounds of samples, got " +
                                    std::to_string(rounds.size()));
    SparseApprox z(y.universe());
    double radius = nu;
    for (std::size_t h = 0; h < H; ++h) {
        const SparseApprox current = y + z;
        ReduceOutput step = linfinity_reduce(ReduceInput{current, rounds[h], radius}, dft, opts);
        z.add(step.z);
        radius /= 2.0;
    }
    return z;
}

} // namespace sft

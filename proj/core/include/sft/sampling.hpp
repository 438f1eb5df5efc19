#pragma once

#include "sft/rng.hpp"
#include "sft/tensor_dft.hpp"

#include <atomic>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace sft {

/// Ordered list of time points (flat indices) with multiplicity.
class SampleList {
public:
    SampleList(Universe u, std::vector<std::size_t> points);

    const Universe& universe() const noexcept { return universe_; }
    std::span<const std::size_t> points() const noexcept { return points_; }
    std::size_t size() const noexcept { return points_.size(); }

private:
    Universe universe_;
    std::vector<std::size_t> points_;
};

/// B points, each coordinate i.i.d. uniform in [0, p).
SampleList draw_sample_list(const Universe& u, std::size_t count, Rng& rng);

/// H x R sample lists of B points each. List (h, r) is drawn from the stream
/// derived from (seed, h, r).
class SampleBundle {
public:
    SampleBundle(Universe u, std::size_t rounds, std::size_t repetitions, std::size_t bucket, std::uint64_t seed);

    const Universe& universe() const noexcept { return universe_; }
    std::size_t rounds() const noexcept { return rounds_; }
    std::size_t repetitions() const noexcept { return repetitions_; }
    std::size_t bucket() const noexcept { return bucket_; }
    std::size_t total_points() const noexcept { return rounds_ * repetitions_ * bucket_; }

    /// h in [0, H), r in [0, R).
    const SampleList& list(std::size_t h, std::size_t r) const { return lists_.at(h * repetitions_ + r); }

    /// Flat indices of every point, with multiplicity.
    std::vector<std::size_t> all_points() const;

private:
    Universe universe_;
    std::size_t rounds_;
    std::size_t repetitions_;
    std::size_t bucket_;
    std::vector<SampleList> lists_;
};

/// c_f^[T] = (1/|T|) sum_{t in T} w^{f.t}.
///
/// The measurement coefficient; the shape is the one forced by the
/// decomposition xhat^[T]_f = sum_{f'} c^[T]_{f-f'} xhat_{f'}.
Complex coefficient(std::size_t f, const SampleList& T);

/// xhat^[T]_f = (sqrt(n)/|T|) sum_i w^{f.T[i]} samples[i].
Complex subset_transform_single(std::span<const Complex> samples, const SampleList& T, std::size_t f);

/// xhat^[T] for every f at once: scatter the samples (summing duplicates) into
/// a dense time vector v, then return (n/|T|) * forward(v).
Spectrum subset_transform_dense(std::span<const Complex> samples, const SampleList& T, const TensorDft& dft);

/// Same as above, writing into a caller-owned length-n buffer.
void subset_transform_dense_into(std::span<const Complex> samples, const SampleList& T, const TensorDft& dft,
                                 std::span<Complex> out);

/// Fraction of `trials` random lists T of `bucket` points for which
///   | sum_{f' in V} c^[T]_{f-f'} xhat_{f'} | >= (10/sqrt(B)) ||xhat_V||_2.
/// Requires f not in V.
double noise_bound_check(const Spectrum& xhat, std::size_t f, std::span<const std::size_t> V, std::size_t bucket,
                         std::size_t trials, Rng& rng);

/// A signal whose reads are restricted to a declared set of time points.
/// Reads outside the set throw AuditViolation. Reads are thread-safe.
class AuditedSignal {
public:
    AuditedSignal(Signal x, std::span<const std::size_t> allowed);

    const Universe& universe() const noexcept { return signal_.universe; }

    Complex read(std::size_t t) const;
    /// Reads every point of T in order.
    std::vector<Complex> measure(const SampleList& T) const;

    /// Adds points to the allowed set. Not safe concurrently with reads.
    void allow(std::span<const std::size_t> points);

    std::size_t distinct_reads() const noexcept { return distinct_.load(); }
    std::size_t total_reads() const noexcept { return total_.load(); }
    bool was_read(std::size_t t) const { return touched_[t].load() != 0; }
    bool is_allowed(std::size_t t) const { return allowed_[t] != 0; }

private:
    Signal signal_;
    std::vector<std::uint8_t> allowed_;
    std::unique_ptr<std::atomic<std::uint8_t>[]> touched_;
    mutable std::atomic<std::size_t> distinct_{0};
    mutable std::atomic<std::size_t> total_{0};
};

} // namespace sft

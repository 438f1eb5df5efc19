#pragma once

#include "sft/sampling.hpp"
#include "sft/tensor_dft.hpp"

#include <optional>
#include <span>
#include <vector>

namespace sft {

/// A sample list together with the signal values read at its points.
struct MeasuredList {
    SampleList points;
    std::vector<Complex> values;
};

/// Reads every list of `bundle` through the audited accessor, in (h, r) order.
/// Result is indexed [h][r].
std::vector<std::vector<MeasuredList>> measure_bundle(const AuditedSignal& x, const SampleBundle& bundle);

struct ReduceOptions {
    /// Compute w = inverse(densify(y)) with a full transform instead of
    /// evaluating y only at the sampled points. Same values, O(n log n) cost.
    bool dense_residual = false;
    /// Keep the per-frequency medians in the output.
    bool keep_medians = false;

    friend bool operator==(const ReduceOptions&, const ReduceOptions&) = default;
};

struct ReduceInput {
    const SparseApprox& y;
    std::span<const MeasuredList> lists;
    double nu;
};

struct ReduceOutput {
    SparseApprox z;
    std::optional<Spectrum> medians;
};

/// One pass of l-infinity reduction. Assuming ||xhat - y||_inf <= 2 nu, aims
/// for ||xhat - y - z||_inf <= nu.
///
/// For each list T_r the residual x_t - w_t is formed at the sampled points
/// (w is the time-domain image of y) and its subset transform u_{., r} is
/// taken densely. Per frequency, eta is the coordinate-wise median over r:
/// the lower median of the real parts plus i times the lower median of the
/// imaginary parts (index floor((R-1)/2) after sorting). z_f = eta_f when
/// |eta_f| >= nu/2, otherwise 0.
///
/// The R repetitions run on up to sft::worker_count() threads; the result
/// does not depend on the thread count.
ReduceOutput linfinity_reduce(const ReduceInput& in, const TensorDft& dft, const ReduceOptions& opts = {});

/// H consecutive reductions using round h's lists at radius 2^{1-h} nu,
/// accumulating into z. rounds[h] holds the R lists of round h.
SparseApprox reduce_h_rounds(const SparseApprox& y, std::span<const std::vector<MeasuredList>> rounds, double nu,
                             std::size_t H, const TensorDft& dft, const ReduceOptions& opts = {});

/// Lower median: element floor((m-1)/2) of the sorted values. Reorders `v`.
double lower_median(std::span<double> v);

/// Threads used for data-parallel loops: SFT_THREADS if set, otherwise the
/// hardware concurrency, and at least 1.
unsigned worker_count();

} // namespace sft

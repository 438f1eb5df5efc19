#pragma once

#include "sft/harness.hpp"
#include "sft/recovery.hpp"
#include "sft/tensor_dft.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace sft {

/// Outcome of one Monte-Carlo property check.
struct Check {
    std::string name;
    bool passed = false;
    double observed = 0.0;
    double bound = 0.0;
    std::string detail;
};

/// Round trip and agreement with the O(n^2) sum on a random signal.
Check check_dft(const Universe& u, std::uint64_t seed, double tol = 1e-9);

/// c_0 = 1 on `draws` random lists.
Check check_coefficient_zero(const Universe& u, std::size_t bucket, std::size_t draws, std::uint64_t seed);

/// |mean |c_f|^2 - 1/B| <= 3 * (sample std of |c_f|^2) / sqrt(draws).
Check check_coefficient_moment(const Universe& u, std::size_t f, std::size_t bucket, std::size_t draws,
                               std::uint64_t seed);

/// Exceedance rate of the 10/sqrt(B) leakage bound on a random Gaussian
/// spectrum, with f = 0 and V = everything else.
Check check_noise_bound(const Universe& u, std::size_t bucket, std::size_t trials, double max_rate,
                        std::uint64_t seed);

/// A single box of radius ratio * r_s at a random center, shifts uniform in
/// the square of radius r_s, grid side 2 r_s. Rate of unique projection
/// against (1 - ratio)^2 - 3 sigma.
Check check_random_shift(double ratio, std::size_t draws, std::uint64_t seed);

struct HalvingOutcome {
    std::size_t trials = 0;
    std::size_t admitted = 0;   ///< inputs with ||xhat - y||_inf <= 2 nu confirmed by the oracle
    std::size_t successes = 0;  ///< ||xhat - y - z||_inf <= nu afterwards
};

/// One l-infinity reduction per trial. The input y is the oracle top-k
/// perturbed by up to 1.98 nu per coordinate, nu = 2^{-j} ||xhat||_inf with j
/// uniform in 1..6 (and nu >= mu). Fresh lists of B = C_B k points,
/// R = C_R ceil(log2 n).
HalvingOutcome halving_experiment(const SignalSpec& signal, const RecoveryConfig& config, std::size_t trials,
                                  std::uint64_t seed);

/// The full lemma suite as run by `sft verify`.
std::vector<Check> lemma_suite(std::uint64_t seed);

} // namespace sft

#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace sft {

using Complex = std::complex<double>;

/// Coordinates of a time point or frequency in [p]^d.
using IndexVec = std::vector<std::int64_t>;

/// The index set [p]^d with n = p^d. Flat index of v is sum_i v[i] * p^i.
class Universe {
public:
    Universe(std::int64_t p, std::int64_t d);

    std::size_t p() const noexcept { return p_; }
    std::size_t d() const noexcept { return d_; }
    std::size_t n() const noexcept { return n_; }

    std::size_t flat_index(std::span<const std::int64_t> v) const;
    IndexVec unflat_index(std::size_t flat) const;

    /// Writes the d base-p digits of `flat` into `out` (size d).
    void digits(std::size_t flat, std::span<std::uint32_t> out) const noexcept;

    /// f^T t mod p for flat indices.
    std::size_t dot_mod_p(std::size_t f, std::size_t t) const noexcept;

    /// ceil(log2 n); 0 for n = 1.
    int ceil_log2_n() const noexcept;

    friend bool operator==(const Universe& a, const Universe& b) noexcept {
        return a.p_ == b.p_ && a.d_ == b.d_;
    }

private:
    std::size_t p_;
    std::size_t d_;
    std::size_t n_;
};

namespace detail {
template <class Tag>
struct Dense {
    Universe universe;
    std::vector<Complex> values;

    explicit Dense(Universe u) : universe(u), values(u.n()) {}
    Dense(Universe u, std::vector<Complex> v);

    Complex operator[](std::size_t i) const { return values[i]; }
    Complex& operator[](std::size_t i) { return values[i]; }
    std::size_t size() const noexcept { return values.size(); }
};
struct TimeTag {};
struct FreqTag {};
} // namespace detail

/// Time-domain vector x over the universe.
using Signal = detail::Dense<detail::TimeTag>;
/// Frequency-domain vector x-hat over the universe.
using Spectrum = detail::Dense<detail::FreqTag>;

/// Sparse frequency-domain vector keyed by flat frequency index. Exact zeros
/// are never stored, so `support()` is the set of nonzero coordinates.
class SparseApprox {
public:
    explicit SparseApprox(Universe u) : universe_(u) {}

    const Universe& universe() const noexcept { return universe_; }

    Complex get(std::size_t f) const;
    void set(std::size_t f, Complex v);
    void add(std::size_t f, Complex v) { set(f, get(f) + v); }
    void add(const SparseApprox& other);

    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    std::vector<std::size_t> support() const;
    const std::map<std::size_t, Complex>& entries() const noexcept { return entries_; }

    Spectrum densify() const;

private:
    Universe universe_;
    std::map<std::size_t, Complex> entries_;
};

SparseApprox operator+(SparseApprox a, const SparseApprox& b);

/// Normalized d-dimensional DFT over [p]^d.
///
/// Sign convention: the forward transform uses the POSITIVE exponent,
///   xhat_f = n^{-1/2} sum_t x_t w^{ f.t },   w = exp(2 pi i / p),
/// and the inverse uses the negative one. This is the opposite of FFTW's
/// FFTW_FORWARD. Both directions are unitary.
///
/// Evaluated by row-column decomposition: a length-p DFT along each axis.
/// Power-of-two p uses an iterative radix-2 kernel, everything else a
/// direct O(p^2) kernel over a precomputed twiddle table.
class TensorDft {
public:
    explicit TensorDft(Universe u);

    const Universe& universe() const noexcept { return universe_; }

    Spectrum forward(const Signal& x) const;
    Signal inverse(const Spectrum& xhat) const;

    /// In-place transforms on a flat buffer of length n, including the
    /// 1/sqrt(n) normalization.
    void forward_inplace(std::span<Complex> data) const;
    void inverse_inplace(std::span<Complex> data) const;

    /// w^j for j in [0, p).
    std::span<const Complex> twiddles() const noexcept { return twiddles_; }

private:
    void transform(std::span<Complex> data, bool positive) const;
    void line_radix2(std::span<Complex> line, bool positive) const;
    void line_direct(std::span<Complex> line, std::span<Complex> scratch, bool positive) const;

    Universe universe_;
    std::vector<Complex> twiddles_;
    std::vector<Complex> inv_twiddles_;
    std::vector<std::size_t> bitrev_;  ///< empty unless p is a power of two
    bool radix2_;
};

/// Evaluates w_t = n^{-1/2} sum_{f in supp(y)} y_f w^{-f.t} at the given flat
/// time points only. Cost O(|points| * |supp(y)| * d).
std::vector<Complex> sparse_eval_time(const SparseApprox& y, std::span<const std::size_t> points);

/// sqrt(sum |v|^2) and max |v|.
double l2_norm(std::span<const Complex> v);
double linf_norm(std::span<const Complex> v);

} // namespace sft

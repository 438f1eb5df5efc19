#include "sft/tensor_dft.hpp"

#include "sft/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace sft {

Universe::Universe(std::int64_t p, std::int64_t d) {
    if (p < 1) throw ConfigError("universe: p must be >= 1, got " + std::to_string(p));
    if (d < 1) throw ConfigError("universe: d must be >= 1, got " + std::to_string(d));
    p_ = static_cast<std::size_t>(p);
    d_ = static_cast<std::size_t>(d);
    std::size_t n = 1;
    // n must stay addressable as a flat index; 2^62 leaves headroom for sums.
    constexpr std::size_t limit = std::size_t{1} << 62;
    for (std::size_t i = 0; i < d_; ++i) {
        if (n > limit / p_)
            throw ConfigError("universe: p^d overflows (p=" + std::to_string(p) + ", d=" + std::to_string(d) + ")");
        n *= p_;
    }
    n_ = n;
}

std::size_t Universe::flat_index(std::span<const std::int64_t> v) const {
    if (v.size() != d_)
        throw std::invalid_argument("flat_index: expected " + std::to_string(d_) + " coordinates, got " +
                                    std::to_string(v.size()));
    std::size_t flat = 0;
    std::size_t stride = 1;
    for (std::size_t i = 0; i < d_; ++i) {
        if (v[i] < 0 || static_cast<std::size_t>(v[i]) >= p_)
            throw std::out_of_range("flat_index: coordinate " + std::to_string(i) + " = " + std::to_string(v[i]) +
                                    " outside [0, " + std::to_string(p_) + ")");
        flat += static_cast<std::size_t>(v[i]) * stride;
        stride *= p_;
    }
    return flat;
}

IndexVec Universe::unflat_index(std::size_t flat) const {
    if (flat >= n_)
        throw std::out_of_range("unflat_index: " + std::to_string(flat) + " outside [0, " + std::to_string(n_) + ")");
    IndexVec v(d_);
    for (std::size_t i = 0; i < d_; ++i) {
        v[i] = static_cast<std::int64_t>(flat % p_);
        flat /= p_;
    }
    return v;
}

void Universe::digits(std::size_t flat, std::span<std::uint32_t> out) const noexcept {
    for (std::size_t i = 0; i < d_; ++i) {
        out[i] = static_cast<std::uint32_t>(flat % p_);
        flat /= p_;
    }
}

std::size_t Universe::dot_mod_p(std::size_t f, std::size_t t) const noexcept {
    std::size_t acc = 0;
    for (std::size_t i = 0; i < d_; ++i) {
        acc = (acc + (f % p_) * (t % p_)) % p_;
        f /= p_;
        t /= p_;
    }
    return acc;
}

int Universe::ceil_log2_n() const noexcept {
    int bits = 0;
    while ((std::size_t{1} << bits) < n_) ++bits;
    return bits;
}

namespace detail {
template <class Tag>
Dense<Tag>::Dense(Universe u, std::vector<Complex> v) : universe(u), values(std::move(v)) {
    if (values.size() != universe.n())
        throw std::invalid_argument("dense vector: length " + std::to_string(values.size()) +
                                    " does not match n = " + std::to_string(universe.n()));
}
template struct Dense<TimeTag>;
template struct Dense<FreqTag>;
} // namespace detail

Complex SparseApprox::get(std::size_t f) const {
    auto it = entries_.find(f);
    return it == entries_.end() ? Complex{} : it->second;
}

void SparseApprox::set(std::size_t f, Complex v) {
    if (f >= universe_.n())
        throw std::out_of_range("sparse approx: frequency " + std::to_string(f) + " outside universe");
    if (v == Complex{})
        entries_.erase(f);
    else
        entries_[f] = v;
}

void SparseApprox::add(const SparseApprox& other) {
    if (!(other.universe_ == universe_)) throw std::invalid_argument("sparse approx: universe mismatch");
    for (const auto& [f, v] : other.entries_) add(f, v);
}

std::vector<std::size_t> SparseApprox::support() const {
    std::vector<std::size_t> s;
    s.reserve(entries_.size());
    for (const auto& kv : entries_) s.push_back(kv.first);
    return s;
}

Spectrum SparseApprox::densify() const {
    Spectrum out(universe_);
    for (const auto& [f, v] : entries_) out[f] = v;
    return out;
}

SparseApprox operator+(SparseApprox a, const SparseApprox& b) {
    a.add(b);
    return a;
}

namespace {

// std::complex multiplication checks for NaN/inf recovery; the kernels only
// ever see finite values.
inline Complex mul(Complex a, Complex b) {
    return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

} // namespace

TensorDft::TensorDft(Universe u) : universe_(u), twiddles_(u.p()), inv_twiddles_(u.p()) {
    const std::size_t p = u.p();
    for (std::size_t j = 0; j < p; ++j) {
        const double theta = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(p);
        twiddles_[j] = {std::cos(theta), std::sin(theta)};
        inv_twiddles_[j] = std::conj(twiddles_[j]);
    }
    radix2_ = p >= 2 && (p & (p - 1)) == 0;
    if (radix2_) {
        bitrev_.resize(p);
        for (std::size_t i = 1, j = 0; i < p; ++i) {
            std::size_t bit = p >> 1;
            for (; j & bit; bit >>= 1) j ^= bit;
            j ^= bit;
            bitrev_[i] = j;
        }
    }
}

Spectrum TensorDft::forward(const Signal& x) const {
    if (!(x.universe == universe_)) throw std::invalid_argument("forward: universe mismatch");
    Spectrum out(universe_, x.values);
    forward_inplace(out.values);
    return out;
}

Signal TensorDft::inverse(const Spectrum& xhat) const {
    if (!(xhat.universe == universe_)) throw std::invalid_argument("inverse: universe mismatch");
    Signal out(universe_, xhat.values);
    inverse_inplace(out.values);
    return out;
}

void TensorDft::forward_inplace(std::span<Complex> data) const { transform(data, true); }
void TensorDft::inverse_inplace(std::span<Complex> data) const { transform(data, false); }

void TensorDft::transform(std::span<Complex> data, bool positive) const {
    const std::size_t p = universe_.p();
    const std::size_t n = universe_.n();
    if (data.size() != n) throw std::invalid_argument("transform: buffer length does not match n");

    if (p > 1) {
        std::vector<Complex> line(p);
        std::vector<Complex> scratch(p);
        std::size_t stride = 1;
        for (std::size_t axis = 0; axis < universe_.d(); ++axis) {
            const std::size_t block = stride * p;
            for (std::size_t base = 0; base < n; base += block) {
                for (std::size_t off = 0; off < stride; ++off) {
                    const std::size_t start = base + off;
                    if (radix2_) {
                        for (std::size_t j = 0; j < p; ++j) line[bitrev_[j]] = data[start + j * stride];
                        line_radix2(line, positive);
                    } else {
                        for (std::size_t j = 0; j < p; ++j) line[j] = data[start + j * stride];
                        line_direct(line, scratch, positive);
                    }
                    for (std::size_t j = 0; j < p; ++j) data[start + j * stride] = line[j];
                }
            }
            stride = block;
        }
    }

    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (auto& v : data) v *= scale;
}

// Expects the input already in bit-reversed order.
void TensorDft::line_radix2(std::span<Complex> a, bool positive) const {
    const std::size_t p = a.size();
    const Complex* tw = positive ? twiddles_.data() : inv_twiddles_.data();
    for (std::size_t len = 2; len <= p; len <<= 1) {
        const std::size_t step = p / len;
        const std::size_t half = len / 2;
        for (std::size_t i = 0; i < p; i += len) {
            for (std::size_t j = 0; j < half; ++j) {
                const Complex u = a[i + j];
                const Complex v = mul(a[i + j + half], tw[j * step]);
                a[i + j] = u + v;
                a[i + j + half] = u - v;
            }
        }
    }
}

void TensorDft::line_direct(std::span<Complex> line, std::span<Complex> scratch, bool positive) const {
    const std::size_t p = line.size();
    const Complex* tw = positive ? twiddles_.data() : inv_twiddles_.data();
    for (std::size_t k = 0; k < p; ++k) {
        Complex acc{};
        std::size_t e = 0;  // j*k mod p, advanced incrementally
        for (std::size_t j = 0; j < p; ++j) {
            acc += mul(line[j], tw[e]);
            e += k;
            if (e >= p) e -= p;
        }
        scratch[k] = acc;
    }
    std::copy(scratch.begin(), scratch.end(), line.begin());
}

std::vector<Complex> sparse_eval_time(const SparseApprox& y, std::span<const std::size_t> points) {
    const Universe& u = y.universe();
    const std::size_t p = u.p();
    const std::size_t d = u.d();
    std::vector<Complex> out(points.size());
    if (y.empty()) return out;

    std::vector<Complex> tw(p);
    for (std::size_t j = 0; j < p; ++j) {
        const double theta = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(p);
        tw[j] = {std::cos(theta), -std::sin(theta)};
    }

    const auto& entries = y.entries();
    std::vector<std::uint32_t> fdig(entries.size() * d);
    std::vector<Complex> coef;
    coef.reserve(entries.size());
    std::size_t row = 0;
    for (const auto& [f, v] : entries) {
        u.digits(f, std::span(fdig).subspan(row * d, d));
        coef.push_back(v);
        ++row;
    }

    const double scale = 1.0 / std::sqrt(static_cast<double>(u.n()));
    std::vector<std::uint32_t> tdig(d);
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i] >= u.n())
            throw std::out_of_range("sparse_eval_time: time point " + std::to_string(points[i]) + " outside universe");
        u.digits(points[i], tdig);
        Complex acc{};
        for (std::size_t s = 0; s < coef.size(); ++s) {
            std::size_t e = 0;
            const std::uint32_t* fd = fdig.data() + s * d;
            for (std::size_t a = 0; a < d; ++a) e = (e + static_cast<std::size_t>(fd[a]) * tdig[a] % p) % p;
            acc += coef[s] * tw[e];
        }
        out[i] = acc * scale;
    }
    return out;
}

double l2_norm(std::span<const Complex> v) {
    double s = 0.0;
    for (const auto& c : v) s += std::norm(c);
    return std::sqrt(s);
}

double linf_norm(std::span<const Complex> v) {
    double m = 0.0;
    for (const auto& c : v) m = std::max(m, std::abs(c));
    return m;
}

} // namespace sft

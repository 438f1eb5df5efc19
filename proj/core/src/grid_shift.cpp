#include "sft/grid_shift.hpp"

#include "sft/errors.hpp"

#include <cmath>
#include <string>

namespace sft {

void ShiftParams::validate() const {
    if (!(box_radius > 0.0) || !(shift_radius >= box_radius) || !(grid_side / 2.0 >= shift_radius))
        throw ConfigError("shift params: need grid/2 >= shift >= box > 0 (grid=" + std::to_string(grid_side) +
                          ", shift=" + std::to_string(shift_radius) + ", box=" + std::to_string(box_radius) + ")");
}

namespace {

double round_half_toward_zero(double q) {
    const double lo = std::floor(q);
    const double frac = q - lo;
    if (frac > 0.5) return lo + 1.0;
    if (frac < 0.5) return lo;
    return lo >= 0.0 ? lo : lo + 1.0;
}

// Whether [lo, hi] (in grid units) contains some m + 1/2.
bool crosses_decision_line(double lo, double hi) {
    return std::floor(hi - 0.5) >= std::ceil(lo - 0.5);
}

} // namespace

Complex project(Complex c, GridSpec grid) {
    if (!(grid.side > 0.0)) throw std::invalid_argument("project: grid side must be positive");
    return {round_half_toward_zero(c.real() / grid.side) * grid.side,
            round_half_toward_zero(c.imag() / grid.side) * grid.side};
}

bool box_projects_uniquely(const Box& box, GridSpec grid) {
    if (!(grid.side > 0.0)) throw std::invalid_argument("box_projects_uniquely: grid side must be positive");
    if (box.radius < 0.0) throw std::invalid_argument("box_projects_uniquely: negative radius");
    const double s = grid.side;
    const double re = box.center.real();
    const double im = box.center.imag();
    return !crosses_decision_line((re - box.radius) / s, (re + box.radius) / s) &&
           !crosses_decision_line((im - box.radius) / s, (im + box.radius) / s);
}

ShiftDraw draw_good_shift(std::span<const Complex> centers, const ShiftParams& params, Rng& rng, int max_attempts) {
    params.validate();
    if (2.0 * params.box_radius >= params.grid_side)
        throw ConfigError("shift params: box side is not smaller than the grid cell, no shift can succeed");
    if (max_attempts < 1) throw ConfigError("draw_good_shift: max_attempts must be >= 1");

    const GridSpec grid{params.grid_side};
    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
        const Complex s{rng.uniform(-params.shift_radius, params.shift_radius),
                        rng.uniform(-params.shift_radius, params.shift_radius)};
        bool good = true;
        for (const auto& c : centers) {
            if (!box_projects_uniquely(Box{c + s, params.box_radius}, grid)) {
                good = false;
                break;
            }
        }
        if (good) return {s, attempt};
    }
    throw ShiftSearchFailed(-1, max_attempts,
                            "no good shift after " + std::to_string(max_attempts) + " attempts for " +
                                std::to_string(centers.size()) + " boxes");
}

} // namespace sft

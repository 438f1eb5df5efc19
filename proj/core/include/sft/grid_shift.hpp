#pragma once

#include "sft/rng.hpp"
#include "sft/tensor_dft.hpp"

#include <span>

namespace sft {

/// Axis-aligned square { center + a + bi : a, b in [-radius, radius] }.
struct Box {
    Complex center;
    double radius = 0.0;
};

/// The lattice side * (Z + iZ).
struct GridSpec {
    double side = 1.0;
};

/// Radii of the shift square, the uncertainty box and the grid.
/// Requires grid/2 >= shift >= box > 0.
struct ShiftParams {
    double shift_radius;
    double box_radius;
    double grid_side;

    void validate() const;
};

/// Nearest grid point. Ties go to the candidate of smallest modulus; the
/// lattice is a product of two 1-D lattices, so this is round-half-toward-zero
/// on each axis independently. Any remaining equal-modulus tie would be
/// broken by (Re, Im) ascending, but a per-axis tie between m and m+1 never
/// has equal |m| and |m+1|, so that fallback is unreachable.
Complex project(Complex c, GridSpec grid);

/// True iff every point of `box` projects to the same grid point, i.e. neither
/// axis interval contains a decision line (m + 1/2) * side. An endpoint lying
/// exactly on a line counts as crossing.
bool box_projects_uniquely(const Box& box, GridSpec grid);

struct ShiftDraw {
    Complex shift;
    int attempts;
};

/// Draws shifts uniformly from the square of radius params.shift_radius until
/// the box of radius params.box_radius around every center + shift projects
/// uniquely onto the grid. Throws ConfigError for invalid params and
/// ShiftSearchFailed (iteration tagged -1) after `max_attempts` failures.
ShiftDraw draw_good_shift(std::span<const Complex> centers, const ShiftParams& params, Rng& rng, int max_attempts);

} // namespace sft

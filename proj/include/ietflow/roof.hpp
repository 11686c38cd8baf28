#pragma once

#include <cstdint>
#include <vector>

#include "ietflow/iet.hpp"
#include "ietflow/scalar.hpp"

namespace ietflow {

struct RoofPiece {
    Scalar start;
    Scalar left_value;
    Scalar slope;
};

/*
 * Right-continuous piecewise-affine function on [0, 1):
 * f(x) = left_value_i + slope_i (x - start_i) on [start_i, start_{i+1}).
 * No sign condition; see PiecewiseRoof for roofs.
 */
class PiecewiseAffine {
public:
    PiecewiseAffine() = default;
    explicit PiecewiseAffine(std::vector<RoofPiece> pieces);
    static PiecewiseAffine constant(const Scalar& c);
    static PiecewiseAffine linear(const Scalar& value_at_0, const Scalar& slope);

    const std::vector<RoofPiece>& pieces() const noexcept { return pieces_; }
    std::size_t piece_count() const noexcept { return pieces_.size(); }
    Scalar piece_end(std::size_t i) const;
    std::size_t piece_index(const Scalar& x) const;

    Scalar evaluate(const Scalar& x) const;
    /// Limit from the left at the end of piece i.
    Scalar right_limit(std::size_t i) const;
    /// Interior breakpoints start_1 .. start_r.
    std::vector<Scalar> breakpoints() const;
    /// f(b) - f(b-) at each interior breakpoint.
    std::vector<Scalar> jumps() const;
    /// f(0) - f(1-), the jump seen when [0,1) is closed into a circle.
    Scalar wrap_jump() const;
    /// Number of interior breakpoints with a nonzero jump.
    int discontinuity_count() const;
    Scalar infimum() const;
    /// Sum of |slope| * length plus sum of |interior jumps|.
    Scalar variation() const;
    /// Integral of Df, i.e. sum of slope * length.
    Scalar sum_of_jumps() const;
    bool piecewise_constant() const;
    bool continuous() const;
    /// Exact integral over [a, b) with 0 <= a <= b <= 1.
    Scalar integral(const Scalar& a, const Scalar& b) const;

    friend PiecewiseAffine operator+(const PiecewiseAffine& f, const PiecewiseAffine& g);
    friend PiecewiseAffine operator-(const PiecewiseAffine& f, const PiecewiseAffine& g);

private:
    std::vector<RoofPiece> pieces_;
};

/// PiecewiseAffine with a strictly positive infimum.
class PiecewiseRoof : public PiecewiseAffine {
public:
    PiecewiseRoof() = default;
    explicit PiecewiseRoof(std::vector<RoofPiece> pieces);
    explicit PiecewiseRoof(const PiecewiseAffine& f);
    Scalar sup_bound() const;
};

/// f^(n)(x) with the signed convention for n < 0; iet must have |lambda| = 1.
Scalar birkhoff_sum(const PiecewiseAffine& f, const Iet& iet, std::int64_t n, const Scalar& x);

Scalar sum_of_jumps(const PiecewiseAffine& f);

struct Decomposition {
    PiecewiseAffine pl;  // slope S(f) on every piece, carries all jumps
    PiecewiseAffine ac;  // continuous, ac(0) = 0, integral of D ac = 0
};

Decomposition decompose(const PiecewiseAffine& f);

/// True iff every interior breakpoint with a nonzero jump is a left endpoint of the iet.
bool continuity_over_exchanged(const PiecewiseAffine& f, const Iet& iet);

}  // namespace ietflow

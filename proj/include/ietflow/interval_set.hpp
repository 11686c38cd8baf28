#pragma once

#include <string>
#include <vector>

#include "ietflow/scalar.hpp"

namespace ietflow {

class Iet;

/// Half-open interval [lo, hi). Empty when hi <= lo.
struct Interval {
    Scalar lo;
    Scalar hi;

    Scalar length() const { return hi - lo; }
    bool empty() const { return compare(hi, lo) <= 0; }
    bool contains(const Scalar& x) const { return compare(lo, x) <= 0 && compare(x, hi) < 0; }
    bool contains(const Interval& o) const {
        return compare(lo, o.lo) <= 0 && compare(o.hi, hi) <= 0;
    }
    Interval shifted(const Scalar& t) const { return {lo + t, hi + t}; }

    friend bool operator==(const Interval&, const Interval&) = default;
};

Interval intersect(const Interval& a, const Interval& b);

/*
 * Finite union of half-open intervals kept as a sorted list of disjoint,
 * non-adjacent, non-empty pieces. All operations are exact sweeps.
 */
class IntervalSet {
public:
    IntervalSet() = default;
    /// Sorts and merges arbitrary (possibly overlapping) pieces.
    explicit IntervalSet(std::vector<Interval> pieces);

    const std::vector<Interval>& pieces() const noexcept { return pieces_; }
    bool empty() const noexcept { return pieces_.empty(); }
    std::size_t size() const noexcept { return pieces_.size(); }
    Scalar measure() const;
    bool contains(const Scalar& x) const;

    friend IntervalSet unite(const IntervalSet& a, const IntervalSet& b);
    friend IntervalSet intersect(const IntervalSet& a, const IntervalSet& b);
    friend IntervalSet subtract(const IntervalSet& a, const IntervalSet& b);
    friend IntervalSet symmetric_difference(const IntervalSet& a, const IntervalSet& b);
    friend bool operator==(const IntervalSet&, const IntervalSet&) = default;

private:
    std::vector<Interval> pieces_;
};

/// T^n(S) for n = +1 or -1, splitting pieces at the discontinuities.
IntervalSet image(const Iet& iet, const IntervalSet& s, int n);

/// True iff the pieces are pairwise disjoint (zero-length overlaps allowed).
bool pairwise_disjoint(std::vector<Interval> pieces);

}  // namespace ietflow

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ietflow/criterion.hpp"
#include "ietflow/iet.hpp"
#include "ietflow/roof.hpp"
#include "ietflow/towers.hpp"

namespace ietflow {

/// A point (x, r) of the region under the roof, 0 <= r < f(x).
struct FlowPoint {
    Scalar x;
    Scalar r;
    friend bool operator==(const FlowPoint&, const FlowPoint&) = default;
};

/// base x band, intersected with the region under the roof.
struct FlowRect {
    Interval base;
    Interval band;
};

/// Exact T^f_t(p); (x, f(x)) is identified with (Tx, 0). Throws InvalidInput for a point off the region.
FlowPoint flow(const PiecewiseRoof& f, const Iet& iet, const FlowPoint& p, const Scalar& t);

bool in_region(const PiecewiseRoof& f, const FlowPoint& p);
bool contains(const FlowRect& rect, const FlowPoint& p);

/// Exact area of rect ∩ {0 <= r < f(x)}.
Scalar rect_measure(const PiecewiseAffine& f, const FlowRect& rect);

struct McEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
    std::int64_t samples = 0;
    std::int64_t hits = 0;
    std::int64_t exact_fallbacks = 0;  // samples decided by exact arithmetic
};

/// Worker threads for sampling: IETFLOW_THREADS if set, else the hardware count.
unsigned default_threads();

/*
 * Monte Carlo estimate of mu^f(T^f_t A ∩ T^f_u B ∩ C) by uniform sampling
 * of [0, 1) x [0, M) with M >= sup f. A sample p counts when p is in C,
 * T^f_{-t} p in A and T^f_{-u} p in B. Deterministic for a fixed seed and
 * any thread count.
 */
McEstimate triple_correlation(const PiecewiseRoof& f, const Iet& iet, const FlowRect& A, const FlowRect& B,
                              const FlowRect& C, const Scalar& t, const Scalar& u, std::int64_t n_samples,
                              std::uint64_t seed, unsigned threads = 0);

struct DiscrepancyRow {
    std::int64_t depth = 0;
    std::size_t rect_id = 0;
    double lhs = 0.0;
    double rhs = 0.0;
    double stderr_ = 0.0;  // of lhs - rhs
    std::string flag;      // "-" at the first depth, else "decrease", "within" or "increase" (beyond 3 sigma)
};

struct JoiningReport {
    std::vector<DiscrepancyRow> rows;
    std::vector<std::int64_t> depths;
    std::vector<double> total_discrepancy;  // sum over rectangles of |lhs - rhs|, per depth
    std::vector<double> total_stderr;
    /// Total discrepancy decreases beyond 3 combined sigma between every pair of consecutive depths.
    bool decreasing = false;
    /// No row flagged "increase".
    bool all_pass = true;
};

/*
 * For each tower and each rectangle R (A = B = C = R) compares
 *   LHS = mu^f(T^f_{-2a}(A ∩ (T^{2q}W x R)) ∩ T^f_{-a}(B ∩ (T^q W x R)) ∩ C)
 *   RHS = Leb(W) * integral of mu^f(T^f_t A ∩ T^f_u B ∩ C) dP(t, u)
 * with P the exact pair distribution on the tower. a[i] belongs to towers[i].
 */
JoiningReport joining_convergence_check(const PiecewiseRoof& f, const Iet& iet,
                                        const std::vector<RigidityTower>& towers,
                                        const std::vector<FlowRect>& rects, const std::vector<Scalar>& a,
                                        std::int64_t n_samples, std::uint64_t seed, unsigned threads = 0);

std::string discrepancy_csv(const JoiningReport& report);

/// Fraction of x, Tx, ..., T^{n-1}x in the interval.
Scalar visit_frequency(const Iet& iet, const Interval& I, const Scalar& x, std::int64_t n);

}  // namespace ietflow

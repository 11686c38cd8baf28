#include "ietflow/interval_set.hpp"

#include <algorithm>

#include "ietflow/errors.hpp"
#include "ietflow/iet.hpp"

namespace ietflow {

namespace {

bool by_lo(const Interval& a, const Interval& b) { return compare(a.lo, b.lo) < 0; }

// Merges sorted pieces, dropping empties and fusing overlaps and adjacency.
std::vector<Interval> normalize_sorted(std::vector<Interval> v) {
    std::vector<Interval> out;
    out.reserve(v.size());
    for (Interval& p : v) {
        if (p.empty()) continue;
        if (!out.empty() && compare(p.lo, out.back().hi) <= 0) {
            if (compare(p.hi, out.back().hi) > 0) out.back().hi = std::move(p.hi);
        } else {
            out.push_back(std::move(p));
        }
    }
    return out;
}

}  // namespace

Interval intersect(const Interval& a, const Interval& b) { return {max(a.lo, b.lo), min(a.hi, b.hi)}; }

IntervalSet::IntervalSet(std::vector<Interval> pieces) {
    std::sort(pieces.begin(), pieces.end(), by_lo);
    pieces_ = normalize_sorted(std::move(pieces));
}

Scalar IntervalSet::measure() const {
    Scalar m;
    for (const Interval& p : pieces_) m += p.length();
    return m;
}

bool IntervalSet::contains(const Scalar& x) const {
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                               [](const Scalar& v, const Interval& p) { return compare(v, p.lo) < 0; });
    if (it == pieces_.begin()) return false;
    return (it - 1)->contains(x);
}

IntervalSet unite(const IntervalSet& a, const IntervalSet& b) {
    std::vector<Interval> v;
    v.reserve(a.size() + b.size());
    std::merge(a.pieces_.begin(), a.pieces_.end(), b.pieces_.begin(), b.pieces_.end(), std::back_inserter(v),
               by_lo);
    IntervalSet s;
    s.pieces_ = normalize_sorted(std::move(v));
    return s;
}

IntervalSet intersect(const IntervalSet& a, const IntervalSet& b) {
    IntervalSet s;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const Interval& p = a.pieces_[i];
        const Interval& q = b.pieces_[j];
        Interval r = intersect(p, q);
        if (!r.empty()) s.pieces_.push_back(std::move(r));
        if (compare(p.hi, q.hi) < 0) {
            ++i;
        } else {
            ++j;
        }
    }
    return s;
}

IntervalSet subtract(const IntervalSet& a, const IntervalSet& b) {
    IntervalSet s;
    std::size_t j = 0;
    for (const Interval& p : a.pieces_) {
        Scalar cur = p.lo;
        while (j < b.size() && compare(b.pieces_[j].hi, cur) <= 0) ++j;
        std::size_t k = j;
        while (k < b.size() && compare(b.pieces_[k].lo, p.hi) < 0) {
            const Interval& q = b.pieces_[k];
            if (compare(q.lo, cur) > 0) s.pieces_.push_back({cur, q.lo});
            if (compare(q.hi, cur) > 0) cur = q.hi;
            if (compare(q.hi, p.hi) >= 0) break;
            ++k;
        }
        if (compare(cur, p.hi) < 0) s.pieces_.push_back({cur, p.hi});
    }
    return s;
}

IntervalSet symmetric_difference(const IntervalSet& a, const IntervalSet& b) {
    return unite(subtract(a, b), subtract(b, a));
}

IntervalSet image(const Iet& iet, const IntervalSet& s, int n) {
    if (n != 1 && n != -1) throw InvalidInput("image supports n = +1 or -1 only");
    const int d = iet.size();
    std::vector<Interval> out;
    for (const Interval& p : s.pieces()) {
        for (int k = 0; k < d; ++k) {
            Interval cell = n == 1 ? iet.interval(k)
                                   : Interval{iet.image_left(iet.pi()(k)),
                                              iet.image_left(iet.pi()(k)) + iet.lambda()[static_cast<std::size_t>(k)]};
            Interval r = intersect(p, cell);
            if (r.empty()) continue;
            out.push_back(r.shifted(n == 1 ? iet.offset(k) : -iet.offset(k)));
        }
    }
    return IntervalSet(std::move(out));
}

bool pairwise_disjoint(std::vector<Interval> pieces) {
    std::erase_if(pieces, [](const Interval& p) { return p.empty(); });
    std::sort(pieces.begin(), pieces.end(), by_lo);
    for (std::size_t i = 1; i < pieces.size(); ++i) {
        if (compare(pieces[i].lo, pieces[i - 1].hi) < 0) return false;
    }
    return true;
}

}  // namespace ietflow

#include "ietflow/joinings.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <thread>

#include "ietflow/errors.hpp"

namespace ietflow {

bool in_region(const PiecewiseRoof& f, const FlowPoint& p) {
    if (p.x.sign() < 0 || compare(p.x, Scalar(1)) >= 0 || p.r.sign() < 0) return false;
    return compare(p.r, f.evaluate(p.x)) < 0;
}

bool contains(const FlowRect& rect, const FlowPoint& p) { return rect.base.contains(p.x) && rect.band.contains(p.r); }

FlowPoint flow(const PiecewiseRoof& f, const Iet& iet, const FlowPoint& p, const Scalar& t) {
    if (iet.total() != Scalar(1)) throw DomainError("special flows need an exchange of [0, 1)");
    if (!in_region(f, p)) throw InvalidInput("point (" + p.x.str() + ", " + p.r.str() + ") is not under the roof");
    Scalar x = p.x;
    Scalar h = p.r + t;
    if (h.sign() >= 0) {
        for (;;) {
            const Scalar v = f.evaluate(x);
            if (compare(h, v) < 0) break;
            h -= v;
            x = iet.step(x);
        }
    } else {
        while (h.sign() < 0) {
            x = iet.step_back(x);
            h += f.evaluate(x);
        }
    }
    return {x, h};
}

Scalar rect_measure(const PiecewiseAffine& f, const FlowRect& rect) {
    const Scalar r1 = max(rect.band.lo, Scalar(0));
    const Scalar r2 = rect.band.hi;
    Scalar total;
    if (compare(r2, r1) <= 0) return total;
    const Scalar height = r2 - r1;
    for (std::size_t i = 0; i < f.piece_count(); ++i) {
        const RoofPiece& p = f.pieces()[i];
        const Scalar lo = max(rect.base.lo, p.start);
        const Scalar hi = min(rect.base.hi, f.piece_end(i));
        if (compare(hi, lo) <= 0) continue;
        std::vector<Scalar> cuts{lo, hi};
        if (!p.slope.is_zero()) {
            for (const Scalar& level : {r1, r2}) {
                const Scalar x = p.start + (level - p.left_value) / p.slope;
                if (compare(lo, x) < 0 && compare(x, hi) < 0) cuts.push_back(x);
            }
        }
        std::sort(cuts.begin(), cuts.end());
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            const Scalar mid = (cuts[k] + cuts[k + 1]) / Scalar(2);
            const Scalar v = p.left_value + p.slope * (mid - p.start);
            // Between cuts the clamped height is affine, so its midpoint value is its mean.
            Scalar g = v - r1;
            if (g.sign() < 0) g = Scalar(0);
            if (compare(g, height) > 0) g = height;
            total += g * (cuts[k + 1] - cuts[k]);
        }
    }
    return total;
}

unsigned default_threads() {
    if (const char* env = std::getenv("IETFLOW_THREADS")) {
        const long n = std::strtol(env, nullptr, 10);
        if (n > 0) return static_cast<unsigned>(n);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

constexpr double kU = 0x1p-53;

std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// j-th uniform in [0, 1) of sample i; a pure function of (seed, stream, i, j).
double uniform(std::uint64_t key, std::int64_t i, int j) {
    const std::uint64_t z = mix(key ^ mix(static_cast<std::uint64_t>(i) * 8 + static_cast<std::uint64_t>(j)));
    return static_cast<double>(z >> 11) * 0x1p-53;
}

struct Approx {
    double v = 0.0;
    double e = 0.0;  // |exact - v| <= e
};

Approx approx(const Scalar& s) {
    const Enclosure en = s.enclose();
    const double v = s.to_double();
    return {v, std::max(en.hi - v, v - en.lo) + std::fabs(v) * 2 * kU};
}

bool near(double a, double b, double e) { return e > 0 && std::fabs(a - b) <= e; }

struct Ambiguous {};

/// Floating copy of the exchange and roof with error-tracked evaluation.
class FastModel {
public:
    FastModel(const PiecewiseAffine& f, const Iet& iet) {
        const int d = iet.size();
        for (int k = 0; k < d; ++k) {
            left_.push_back(approx(iet.left(k)));
            ileft_.push_back(approx(iet.image_left(k)));
            off_.push_back(approx(iet.offset(k)));
            pinv_.push_back(iet.pi().inverse()(k));
        }
        total_ = approx(iet.total());
        for (std::size_t i = 0; i < f.piece_count(); ++i) {
            start_.push_back(approx(f.pieces()[i].start));
            lv_.push_back(approx(f.pieces()[i].left_value));
            slope_.push_back(approx(f.pieces()[i].slope));
        }
    }

    static std::size_t locate(const std::vector<Approx>& lefts, const Approx& end, const Approx& x) {
        std::size_t k = 0;
        while (k + 1 < lefts.size() && lefts[k + 1].v <= x.v) ++k;
        if (near(x.v, lefts[k].v, x.e + lefts[k].e)) throw Ambiguous{};
        const Approx& next = k + 1 < lefts.size() ? lefts[k + 1] : end;
        if (near(x.v, next.v, x.e + next.e)) throw Ambiguous{};
        if (x.v < 0 || x.v >= end.v) throw Ambiguous{};
        return k;
    }

    Approx step(const Approx& x) const {
        const Approx& o = off_[locate(left_, total_, x)];
        const double y = x.v + o.v;
        return {y, x.e + o.e + 2 * kU * (std::fabs(x.v) + std::fabs(o.v))};
    }

    Approx step_back(const Approx& x) const {
        const Approx& o = off_[static_cast<std::size_t>(pinv_[locate(ileft_, total_, x)])];
        const double y = x.v - o.v;
        return {y, x.e + o.e + 2 * kU * (std::fabs(x.v) + std::fabs(o.v))};
    }

    Approx roof(const Approx& x) const {
        std::size_t k = 0;
        while (k + 1 < start_.size() && start_[k + 1].v <= x.v) ++k;
        if (k > 0 && near(x.v, start_[k].v, x.e + start_[k].e)) throw Ambiguous{};
        if (k + 1 < start_.size() && near(x.v, start_[k + 1].v, x.e + start_[k + 1].e)) throw Ambiguous{};
        const double dx = x.v - start_[k].v;
        const double edx = x.e + start_[k].e + 2 * kU * (std::fabs(x.v) + std::fabs(start_[k].v));
        const double prod = slope_[k].v * dx;
        const double eprod = std::fabs(slope_[k].v) * edx + slope_[k].e * (std::fabs(dx) + edx) +
                             2 * kU * std::fabs(prod);
        const double v = lv_[k].v + prod;
        return {v, eprod + lv_[k].e + 2 * kU * (std::fabs(lv_[k].v) + std::fabs(prod))};
    }

    /// T^f_t of (x, r) given as floating approximations; throws Ambiguous on any unresolved comparison.
    std::pair<Approx, Approx> flow(Approx x, const Approx& r, const Approx& t) const {
        Approx h{r.v + t.v, r.e + t.e + 2 * kU * (std::fabs(r.v) + std::fabs(t.v))};
        if (near(h.v, 0, h.e)) throw Ambiguous{};
        if (h.v >= 0) {
            for (;;) {
                const Approx v = roof(x);
                if (near(h.v, v.v, h.e + v.e)) throw Ambiguous{};
                if (h.v < v.v) break;
                const double nh = h.v - v.v;
                h = {nh, h.e + v.e + 2 * kU * (std::fabs(h.v) + std::fabs(v.v))};
                x = step(x);
            }
        } else {
            while (h.v < 0) {
                x = step_back(x);
                const Approx v = roof(x);
                const double nh = h.v + v.v;
                h = {nh, h.e + v.e + 2 * kU * (std::fabs(h.v) + std::fabs(v.v))};
                if (near(h.v, 0, h.e)) throw Ambiguous{};
            }
        }
        return {x, h};
    }

private:
    std::vector<Approx> left_, ileft_, off_;
    std::vector<int> pinv_;
    Approx total_;
    std::vector<Approx> start_, lv_, slope_;
};

bool fast_in(const Approx& x, const Approx& lo, const Approx& hi) {
    if (near(x.v, lo.v, x.e + lo.e) || near(x.v, hi.v, x.e + hi.e)) throw Ambiguous{};
    return lo.v <= x.v && x.v < hi.v;
}

struct FastRect {
    Approx blo, bhi, rlo, rhi;
    explicit FastRect(const FlowRect& r)
        : blo(approx(r.base.lo)), bhi(approx(r.base.hi)), rlo(approx(r.band.lo)), rhi(approx(r.band.hi)) {}
    bool contains(const Approx& x, const Approx& r) const { return fast_in(x, blo, bhi) && fast_in(r, rlo, rhi); }
};

/// Membership of y - shift in a sorted disjoint union of intervals.
struct ShiftedSet {
    IntervalSet set;
    Scalar shift;
    std::vector<Approx> lo, hi;
    Approx fshift;

    ShiftedSet(IntervalSet s, Scalar sh) : set(std::move(s)), shift(std::move(sh)), fshift(approx(shift)) {
        for (const Interval& p : set.pieces()) {
            lo.push_back(approx(p.lo));
            hi.push_back(approx(p.hi));
        }
    }

    bool exact(const Scalar& y) const { return set.contains(y - shift); }

    bool fast(const Approx& y) const {
        const Approx z{y.v - fshift.v, y.e + fshift.e + 2 * kU * (std::fabs(y.v) + std::fabs(fshift.v))};
        auto it = std::upper_bound(lo.begin(), lo.end(), z.v, [](double v, const Approx& a) { return v < a.v; });
        const std::size_t k = static_cast<std::size_t>(it - lo.begin());
        if (k < lo.size() && near(z.v, lo[k].v, z.e + lo[k].e)) throw Ambiguous{};
        if (k == 0) return false;
        if (near(z.v, lo[k - 1].v, z.e + lo[k - 1].e) || near(z.v, hi[k - 1].v, z.e + hi[k - 1].e)) {
            throw Ambiguous{};
        }
        return z.v < hi[k - 1].v;
    }
};

/// A flow leg: the point at `time` from the leg `from` (-1 for the sample) must lie in rect and the filter.
struct Leg {
    int from = -1;
    std::size_t time = 0;  // index into the per-sample time list
    FlowRect rect;
    const ShiftedSet* filter = nullptr;
};

struct TimeValue {
    Approx fast;
    std::function<Scalar()> exact;
};

using TimeSampler = std::function<std::vector<TimeValue>(std::int64_t i)>;

struct Counts {
    std::int64_t hits = 0;
    std::int64_t hits2 = 0;
    std::int64_t both = 0;
    std::int64_t fallbacks = 0;
};

/// A list of legs with its per-sample times; a sample counts when every leg holds.
struct Event {
    std::vector<Leg> legs;
    TimeSampler times;
};

/*
 * Draws uniform points of [0, 1) x [0, M) and tests one or two events on
 * the same point, so that their difference has a paired standard error.
 */
class Sampler {
public:
    Sampler(const PiecewiseRoof& f, const Iet& iet, std::vector<Event> events, std::uint64_t key)
        : f_(f), iet_(iet), model_(f, iet), events_(std::move(events)), key_(key) {
        // M: a power of two above sup f, so the sampled heights stay exact doubles.
        const double sup = approx(f.sup_bound()).v * (1 + 1e-9) + 1e-300;
        M_ = std::exp2(std::ceil(std::log2(sup)));
        for (const Event& e : events_) {
            fast_rects_.emplace_back();
            for (const Leg& l : e.legs) fast_rects_.back().emplace_back(l.rect);
        }
    }

    double box() const { return M_; }

    Counts run(std::int64_t begin, std::int64_t end) const {
        Counts c;
        for (std::int64_t i = begin; i < end; ++i) {
            const double x = uniform(key_, i, 0);
            const double r = uniform(key_, i, 1) * M_;
            bool hit[2] = {false, false};
            for (std::size_t k = 0; k < events_.size(); ++k) {
                const auto times = events_[k].times(i);
                try {
                    hit[k] = fast_sample(k, x, r, times);
                } catch (const Ambiguous&) {
                    ++c.fallbacks;
                    hit[k] = exact_sample(k, x, r, times);
                }
            }
            c.hits += hit[0] ? 1 : 0;
            c.hits2 += hit[1] ? 1 : 0;
            c.both += hit[0] && hit[1] ? 1 : 0;
        }
        return c;
    }

private:
    bool fast_sample(std::size_t k, double x, double r, const std::vector<TimeValue>& times) const {
        const Approx ax{x, 0.0}, ar{r, 0.0};
        const Approx fx = model_.roof(ax);
        if (near(r, fx.v, fx.e)) throw Ambiguous{};
        if (r >= fx.v) return false;
        const auto& legs = events_[k].legs;
        std::vector<std::pair<Approx, Approx>> pts;
        for (std::size_t j = 0; j < legs.size(); ++j) {
            const Leg& l = legs[j];
            const auto& src = l.from < 0 ? std::pair<Approx, Approx>{ax, ar} : pts[static_cast<std::size_t>(l.from)];
            const Approx& t = times[l.time].fast;
            auto p = (t.v == 0 && t.e == 0) ? src : model_.flow(src.first, src.second, t);
            if (!fast_rects_[k][j].contains(p.first, p.second)) return false;
            if (l.filter && !l.filter->fast(p.first)) return false;
            pts.push_back(p);
        }
        return true;
    }

    bool exact_sample(std::size_t k, double x, double r, const std::vector<TimeValue>& times) const {
        const FlowPoint p0{Scalar::from_double(x), Scalar::from_double(r)};
        if (!in_region(f_, p0)) return false;
        std::vector<FlowPoint> pts;
        for (const Leg& l : events_[k].legs) {
            const FlowPoint& src = l.from < 0 ? p0 : pts[static_cast<std::size_t>(l.from)];
            const FlowPoint p = flow(f_, iet_, src, times[l.time].exact());
            if (!contains(l.rect, p)) return false;
            if (l.filter && !l.filter->exact(p.x)) return false;
            pts.push_back(p);
        }
        return true;
    }

    const PiecewiseRoof& f_;
    const Iet& iet_;
    FastModel model_;
    std::vector<Event> events_;
    std::vector<std::vector<FastRect>> fast_rects_;
    std::uint64_t key_;
    double M_ = 1.0;
};

constexpr std::int64_t kBlock = 4096;

Counts run_blocks(const Sampler& s, std::int64_t n, unsigned threads) {
    if (n < 1) throw InvalidInput("n_samples must be >= 1");
    if (threads == 0) threads = default_threads();
    const std::int64_t blocks = (n + kBlock - 1) / kBlock;
    std::vector<Counts> out(static_cast<std::size_t>(blocks));
    auto work = [&](unsigned w) {
        for (std::int64_t b = w; b < blocks; b += threads) {
            out[static_cast<std::size_t>(b)] = s.run(b * kBlock, std::min(n, (b + 1) * kBlock));
        }
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
        for (auto& th : pool) th.join();
    }
    Counts total;
    for (const Counts& c : out) {
        total.hits += c.hits;
        total.hits2 += c.hits2;
        total.both += c.both;
        total.fallbacks += c.fallbacks;
    }
    return total;
}

McEstimate bernoulli_estimate(std::int64_t hits, std::int64_t n, double area) {
    McEstimate e;
    e.hits = hits;
    e.samples = n;
    const double p = static_cast<double>(hits) / static_cast<double>(n);
    e.value = area * p;
    e.stderr_ = area * std::sqrt(p * (1 - p) / static_cast<double>(n));
    return e;
}

std::uint64_t stream_key(std::uint64_t seed, std::uint64_t stream) { return mix(mix(seed) ^ (stream * 0xD1B54A32D192ED03ull)); }

TimeValue fixed_time(const Scalar& t) {
    return {approx(t), [t] { return t; }};
}

}  // namespace

McEstimate triple_correlation(const PiecewiseRoof& f, const Iet& iet, const FlowRect& A, const FlowRect& B,
                              const FlowRect& C, const Scalar& t, const Scalar& u, std::int64_t n_samples,
                              std::uint64_t seed, unsigned threads) {
    if (iet.total() != Scalar(1)) throw DomainError("special flows need an exchange of [0, 1)");
    std::vector<Leg> legs{{-1, 0, C, nullptr}, {-1, 1, A, nullptr}, {-1, 2, B, nullptr}};
    const std::vector<TimeValue> ts{fixed_time(Scalar(0)), fixed_time(-t), fixed_time(-u)};
    std::vector<Event> ev;
    ev.push_back({std::move(legs), [ts](std::int64_t) { return ts; }});
    Sampler s(f, iet, std::move(ev), stream_key(seed, 0));
    const Counts c = run_blocks(s, n_samples, threads);
    McEstimate e = bernoulli_estimate(c.hits, n_samples, s.box());
    e.exact_fallbacks = c.fallbacks;
    return e;
}

JoiningReport joining_convergence_check(const PiecewiseRoof& f, const Iet& iet,
                                        const std::vector<RigidityTower>& towers,
                                        const std::vector<FlowRect>& rects, const std::vector<Scalar>& a,
                                        std::int64_t n_samples, std::uint64_t seed, unsigned threads) {
    if (a.size() != towers.size()) throw InvalidInput("one centering constant per tower is required");
    JoiningReport rep;
    if (rects.empty()) {
        rep.all_pass = true;
        return rep;
    }
    std::vector<double> prev_disc;
    std::vector<double> prev_se;
    for (std::size_t n = 0; n < towers.size(); ++n) {
        const RigidityTower& t = towers[n];
        const IntervalSet W = t.W();
        const ShiftedSet W1(W, t.displacement), W2(W, t.displacement * Scalar(2));
        const PairMeasure P = pair_distribution(f, iet, t, a[n]);
        const double alpha = approx(t.measure).v;

        // Components of P with cumulative masses for inverse-transform sampling.
        std::vector<double> cum;
        double acc = 0;
        for (const auto& at : P.atoms) cum.push_back(acc += approx(at.mass).v);
        for (const auto& sg : P.segments) cum.push_back(acc += approx(sg.mass).v);
        const std::uint64_t pick_key = stream_key(seed, 1'000'003ull * (n + 1));
        TimeSampler from_P = [&P, cum, acc, pick_key](std::int64_t i) {
            const double u = uniform(pick_key, i, 0) * acc;
            std::size_t k = static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
            k = std::min(k, cum.size() - 1);
            std::vector<TimeValue> ts{fixed_time(Scalar(0))};
            if (k < P.atoms.size()) {
                ts.push_back(fixed_time(-P.atoms[k].x));
                ts.push_back(fixed_time(-P.atoms[k].y));
            } else {
                const PairSegment& sg = P.segments[k - P.atoms.size()];
                const double s = uniform(pick_key, i, 1);
                auto along = [s](const Scalar& p0, const Scalar& p1) {
                    const Approx a0 = approx(p0), a1 = approx(p1);
                    const double v = -(a0.v + s * (a1.v - a0.v));
                    const double e = 3 * (a0.e + a1.e) + 8 * kU * (std::fabs(a0.v) + std::fabs(a1.v));
                    return TimeValue{{v, e}, [s, p0, p1] { return -(p0 + Scalar::from_double(s) * (p1 - p0)); }};
                };
                ts.push_back(along(sg.x0, sg.x1));
                ts.push_back(along(sg.y0, sg.y1));
            }
            return ts;
        };

        double disc_sum = 0, var_sum = 0;
        std::vector<double> disc_row, se_row;
        for (std::size_t id = 0; id < rects.size(); ++id) {
            const FlowRect& R = rects[id];
            std::vector<Leg> lhs_legs{{-1, 0, R, nullptr}, {-1, 1, R, &W1}, {1, 1, R, &W2}};
            const std::vector<TimeValue> lhs_times{fixed_time(Scalar(0)), fixed_time(a[n])};
            std::vector<Leg> rhs_legs{{-1, 0, R, nullptr}, {-1, 1, R, nullptr}, {-1, 2, R, nullptr}};
            std::vector<Event> ev;
            ev.push_back({std::move(lhs_legs), [lhs_times](std::int64_t) { return lhs_times; }});
            ev.push_back({std::move(rhs_legs), from_P});
            // Both sides see the same sample points, so the difference has a paired error.
            Sampler s(f, iet, std::move(ev), stream_key(seed, n * rects.size() + id + 1));
            const Counts c = run_blocks(s, n_samples, threads);
            const double N = static_cast<double>(n_samples);
            const double pl = static_cast<double>(c.hits) / N, pr = static_cast<double>(c.hits2) / N;
            const double plr = static_cast<double>(c.both) / N;
            const double second = pl + alpha * alpha * pr - 2 * alpha * plr;
            const double var = std::max(0.0, second - (pl - alpha * pr) * (pl - alpha * pr));
            DiscrepancyRow row;
            row.depth = t.depth;
            row.rect_id = id;
            row.lhs = s.box() * pl;
            row.rhs = s.box() * alpha * pr;
            row.stderr_ = s.box() * std::sqrt(var / N);
            const double disc = std::fabs(row.lhs - row.rhs);
            if (prev_disc.empty()) {
                row.flag = "-";
            } else {
                const double comb = 3 * std::hypot(row.stderr_, prev_se[id]);
                row.flag = disc < prev_disc[id] - comb ? "decrease" : disc > prev_disc[id] + comb ? "increase" : "within";
                if (row.flag == "increase") rep.all_pass = false;
            }
            disc_row.push_back(disc);
            se_row.push_back(row.stderr_);
            disc_sum += disc;
            var_sum += row.stderr_ * row.stderr_;
            rep.rows.push_back(row);
        }
        rep.depths.push_back(t.depth);
        rep.total_discrepancy.push_back(disc_sum);
        rep.total_stderr.push_back(std::sqrt(var_sum));
        prev_disc = std::move(disc_row);
        prev_se = std::move(se_row);
    }
    rep.decreasing = rep.depths.size() >= 2;
    for (std::size_t k = 1; k < rep.depths.size(); ++k) {
        const double comb = 3 * std::hypot(rep.total_stderr[k], rep.total_stderr[k - 1]);
        if (!(rep.total_discrepancy[k] < rep.total_discrepancy[k - 1] - comb)) rep.decreasing = false;
    }
    return rep;
}

std::string discrepancy_csv(const JoiningReport& report) {
    std::ostringstream out;
    out.precision(10);
    out << "depth,rect_id,lhs,rhs,stderr,flag\n";
    for (const auto& r : report.rows) {
        out << r.depth << ',' << r.rect_id << ',' << r.lhs << ',' << r.rhs << ',' << r.stderr_ << ',' << r.flag << '\n';
    }
    return out.str();
}

Scalar visit_frequency(const Iet& iet, const Interval& I, const Scalar& x, std::int64_t n) {
    if (n < 1) throw InvalidInput("orbit length must be >= 1");
    if (!iet.in_domain(x)) throw DomainError("point " + x.str() + " is outside the domain");
    std::int64_t hits = 0;
    Scalar y = x;
    for (std::int64_t i = 0; i < n; ++i) {
        hits += I.contains(y) ? 1 : 0;
        y = iet.step(y);
    }
    return Scalar(mpq_class(hits, n));
}

}  // namespace ietflow

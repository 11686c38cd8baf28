#include "ietflow/roof.hpp"

#include <algorithm>

#include "ietflow/errors.hpp"

namespace ietflow {

PiecewiseAffine::PiecewiseAffine(std::vector<RoofPiece> pieces) : pieces_(std::move(pieces)) {
    if (pieces_.empty()) throw InvalidInput("a piecewise function needs at least one piece");
    if (!pieces_.front().start.is_zero()) throw InvalidInput("the first piece must start at 0");
    for (std::size_t i = 1; i < pieces_.size(); ++i) {
        if (compare(pieces_[i - 1].start, pieces_[i].start) >= 0) {
            throw InvalidInput("piece starts must be strictly increasing");
        }
    }
    if (compare(pieces_.back().start, Scalar(1)) >= 0) throw InvalidInput("piece starts must lie in [0, 1)");
}

PiecewiseAffine PiecewiseAffine::constant(const Scalar& c) { return PiecewiseAffine({{Scalar(0), c, Scalar(0)}}); }

PiecewiseAffine PiecewiseAffine::linear(const Scalar& value_at_0, const Scalar& slope) {
    return PiecewiseAffine({{Scalar(0), value_at_0, slope}});
}

Scalar PiecewiseAffine::piece_end(std::size_t i) const {
    return i + 1 < pieces_.size() ? pieces_[i + 1].start : Scalar(1);
}

std::size_t PiecewiseAffine::piece_index(const Scalar& x) const {
    if (x.sign() < 0 || compare(x, Scalar(1)) >= 0) throw DomainError("point " + x.str() + " is outside [0, 1)");
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                               [](const Scalar& v, const RoofPiece& p) { return compare(v, p.start) < 0; });
    return static_cast<std::size_t>(it - pieces_.begin()) - 1;
}

Scalar PiecewiseAffine::evaluate(const Scalar& x) const {
    const RoofPiece& p = pieces_[piece_index(x)];
    if (p.slope.is_zero()) return p.left_value;
    return p.left_value + p.slope * (x - p.start);
}

Scalar PiecewiseAffine::right_limit(std::size_t i) const {
    const RoofPiece& p = pieces_[i];
    return p.left_value + p.slope * (piece_end(i) - p.start);
}

std::vector<Scalar> PiecewiseAffine::breakpoints() const {
    std::vector<Scalar> b;
    for (std::size_t i = 1; i < pieces_.size(); ++i) b.push_back(pieces_[i].start);
    return b;
}

std::vector<Scalar> PiecewiseAffine::jumps() const {
    std::vector<Scalar> j;
    for (std::size_t i = 1; i < pieces_.size(); ++i) j.push_back(pieces_[i].left_value - right_limit(i - 1));
    return j;
}

Scalar PiecewiseAffine::wrap_jump() const { return pieces_.front().left_value - right_limit(pieces_.size() - 1); }

int PiecewiseAffine::discontinuity_count() const {
    int n = 0;
    for (const Scalar& j : jumps()) n += j.is_zero() ? 0 : 1;
    return n;
}

Scalar PiecewiseAffine::infimum() const {
    Scalar m = pieces_.front().left_value;
    for (std::size_t i = 0; i < pieces_.size(); ++i) m = min(m, min(pieces_[i].left_value, right_limit(i)));
    return m;
}

Scalar PiecewiseAffine::variation() const {
    Scalar v;
    for (std::size_t i = 0; i < pieces_.size(); ++i) v += (pieces_[i].slope * (piece_end(i) - pieces_[i].start)).abs();
    for (const Scalar& j : jumps()) v += j.abs();
    return v;
}

Scalar PiecewiseAffine::sum_of_jumps() const {
    Scalar s;
    for (std::size_t i = 0; i < pieces_.size(); ++i) s += pieces_[i].slope * (piece_end(i) - pieces_[i].start);
    return s;
}

bool PiecewiseAffine::piecewise_constant() const {
    return std::all_of(pieces_.begin(), pieces_.end(), [](const RoofPiece& p) { return p.slope.is_zero(); });
}

bool PiecewiseAffine::continuous() const {
    for (const Scalar& j : jumps())
        if (!j.is_zero()) return false;
    return true;
}

Scalar PiecewiseAffine::integral(const Scalar& a, const Scalar& b) const {
    if (a.sign() < 0 || compare(b, Scalar(1)) > 0 || compare(a, b) > 0) {
        throw DomainError("integration range [" + a.str() + ", " + b.str() + ") is outside [0, 1)");
    }
    Scalar total;
    if (compare(a, b) == 0) return total;
    for (std::size_t i = piece_index(a); i < pieces_.size(); ++i) {
        const RoofPiece& p = pieces_[i];
        if (compare(p.start, b) >= 0) break;
        const Scalar lo = max(a, p.start);
        const Scalar hi = min(b, piece_end(i));
        const Scalar len = hi - lo;
        // Affine integrand: length times the value at the midpoint.
        total += len * (p.left_value + p.slope * ((lo + hi) / Scalar(2) - p.start));
    }
    return total;
}

namespace {

PiecewiseAffine combine(const PiecewiseAffine& f, const PiecewiseAffine& g, int sign) {
    std::vector<Scalar> starts;
    for (const auto& p : f.pieces()) starts.push_back(p.start);
    for (const auto& p : g.pieces()) starts.push_back(p.start);
    std::sort(starts.begin(), starts.end());
    starts.erase(std::unique(starts.begin(), starts.end()), starts.end());
    std::vector<RoofPiece> out;
    for (const Scalar& s : starts) {
        const RoofPiece& pf = f.pieces()[f.piece_index(s)];
        const RoofPiece& pg = g.pieces()[g.piece_index(s)];
        out.push_back({s, f.evaluate(s) + Scalar(sign) * g.evaluate(s), pf.slope + Scalar(sign) * pg.slope});
    }
    return PiecewiseAffine(std::move(out));
}

}  // namespace

PiecewiseAffine operator+(const PiecewiseAffine& f, const PiecewiseAffine& g) { return combine(f, g, 1); }
PiecewiseAffine operator-(const PiecewiseAffine& f, const PiecewiseAffine& g) { return combine(f, g, -1); }

PiecewiseRoof::PiecewiseRoof(std::vector<RoofPiece> pieces) : PiecewiseRoof(PiecewiseAffine(std::move(pieces))) {}

PiecewiseRoof::PiecewiseRoof(const PiecewiseAffine& f) : PiecewiseAffine(f) {
    if (infimum().sign() <= 0) throw InvalidInput("roof infimum " + infimum().str() + " is not positive");
}

Scalar PiecewiseRoof::sup_bound() const {
    Scalar m = pieces().front().left_value;
    for (std::size_t i = 0; i < piece_count(); ++i) m = max(m, max(pieces()[i].left_value, right_limit(i)));
    return m;
}

Scalar birkhoff_sum(const PiecewiseAffine& f, const Iet& iet, std::int64_t n, const Scalar& x) {
    if (iet.total() != Scalar(1)) throw DomainError("Birkhoff sums need an exchange of [0, 1)");
    if (!iet.in_domain(x)) throw DomainError("point " + x.str() + " is outside [0, 1)");
    Scalar s;
    Scalar y = x;
    if (n >= 0) {
        for (std::int64_t i = 0; i < n; ++i) {
            s += f.evaluate(y);
            y = iet.step(y);
        }
    } else {
        for (std::int64_t i = 0; i < -n; ++i) {
            y = iet.step_back(y);
            s -= f.evaluate(y);
        }
    }
    return s;
}

Scalar sum_of_jumps(const PiecewiseAffine& f) { return f.sum_of_jumps(); }

Decomposition decompose(const PiecewiseAffine& f) {
    const Scalar S = f.sum_of_jumps();
    std::vector<RoofPiece> pl, ac;
    Scalar c;  // ac at the start of the current piece
    for (std::size_t i = 0; i < f.piece_count(); ++i) {
        const RoofPiece& p = f.pieces()[i];
        const Scalar s = p.slope - S;
        ac.push_back({p.start, c, s});
        pl.push_back({p.start, p.left_value - c, S});
        c += s * (f.piece_end(i) - p.start);
    }
    return {PiecewiseAffine(std::move(pl)), PiecewiseAffine(std::move(ac))};
}

bool continuity_over_exchanged(const PiecewiseAffine& f, const Iet& iet) {
    const auto b = f.breakpoints();
    const auto j = f.jumps();
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (j[i].is_zero()) continue;
        if (std::find(iet.lefts().begin(), iet.lefts().end(), b[i]) == iet.lefts().end()) return false;
    }
    return true;
}

}  // namespace ietflow

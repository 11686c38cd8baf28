#include "ietflow/iet.hpp"

#include <algorithm>

#include "ietflow/errors.hpp"

namespace ietflow {

namespace {

int locate(const std::vector<Scalar>& lefts, const Scalar& x) {
    auto it = std::upper_bound(lefts.begin(), lefts.end(), x,
                               [](const Scalar& v, const Scalar& e) { return compare(v, e) < 0; });
    return static_cast<int>(it - lefts.begin()) - 1;
}

}  // namespace

Iet::Iet(Permutation pi, std::vector<Scalar> lambda) : pi_(std::move(pi)), lambda_(std::move(lambda)) {
    const int d = pi_.size();
    if (d < 2) throw InvalidInput("an exchange needs d >= 2 intervals");
    if (static_cast<int>(lambda_.size()) != d) {
        throw InvalidInput("permutation has " + std::to_string(d) + " entries but " +
                           std::to_string(lambda_.size()) + " lengths were given");
    }
    if (!is_irreducible(pi_)) throw InvalidInput("permutation " + pi_.str() + " is reducible");
    for (const Scalar& l : lambda_) {
        if (l.sign() <= 0) throw InvalidInput("length " + l.str() + " is not positive");
        if (!l.is_rational()) {
            if (field_ != 0 && field_ != l.radicand()) throw FieldMismatch("lengths lie in different fields");
            field_ = l.radicand();
        }
    }
    pi_inv_ = pi_.inverse();
    left_.resize(static_cast<std::size_t>(d));
    image_left_.resize(static_cast<std::size_t>(d));
    Scalar acc;
    for (int k = 0; k < d; ++k) {
        left_[static_cast<std::size_t>(k)] = acc;
        acc += lambda_[static_cast<std::size_t>(k)];
    }
    total_ = acc;
    acc = Scalar();
    for (int s = 0; s < d; ++s) {
        image_left_[static_cast<std::size_t>(s)] = acc;
        acc += lambda_[static_cast<std::size_t>(pi_inv_(s))];
    }
    offset_.resize(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) {
        offset_[static_cast<std::size_t>(k)] =
            image_left_[static_cast<std::size_t>(pi_(k))] - left_[static_cast<std::size_t>(k)];
    }
}

Interval Iet::interval(int k) const {
    return {left_[static_cast<std::size_t>(k)], left_[static_cast<std::size_t>(k)] + lambda_[static_cast<std::size_t>(k)]};
}

int Iet::index_of(const Scalar& x) const { return locate(left_, x); }

int Iet::preimage_index_of(const Scalar& x) const { return pi_inv_(locate(image_left_, x)); }

bool Iet::in_domain(const Scalar& x) const { return x.sign() >= 0 && compare(x, total_) < 0; }

Scalar Iet::apply(const Scalar& x, std::int64_t n) const {
    if (!in_domain(x)) throw DomainError("point " + x.str() + " is outside [0, " + total_.str() + ")");
    Scalar y = x;
    if (n >= 0) {
        for (std::int64_t i = 0; i < n; ++i) y = step(y);
    } else {
        for (std::int64_t i = 0; i < -n; ++i) y = step_back(y);
    }
    return y;
}

std::vector<Scalar> Iet::orbit(const Scalar& x, std::int64_t n) const {
    if (!in_domain(x)) throw DomainError("point " + x.str() + " is outside [0, " + total_.str() + ")");
    const std::int64_t len = n >= 0 ? n : -n;
    std::vector<Scalar> out;
    out.reserve(static_cast<std::size_t>(len) + 1);
    out.push_back(x);
    for (std::int64_t i = 0; i < len; ++i) out.push_back(n >= 0 ? step(out.back()) : step_back(out.back()));
    return out;
}

Iet Iet::inverse() const {
    std::vector<Scalar> lam(lambda_.size());
    for (int s = 0; s < size(); ++s) lam[static_cast<std::size_t>(s)] = lambda_[static_cast<std::size_t>(pi_inv_(s))];
    return Iet(pi_inv_, std::move(lam));
}

std::vector<Scalar> translation_offsets(const Iet& iet) { return iet.offsets(); }

std::optional<KeaneViolationRecord> keane_check(const Iet& iet, std::int64_t depth, bool include_origin) {
    if (depth < 1) throw InvalidInput("keane_check depth must be >= 1");
    const int first = include_origin ? 0 : 1;
    std::vector<Scalar> pts(iet.lefts().begin() + first, iet.lefts().end());
    for (std::int64_t k = 1; k <= depth; ++k) {
        for (std::size_t s = 0; s < pts.size(); ++s) {
            pts[s] = iet.step(pts[s]);
            const int j = iet.index_of(pts[s]);
            if (iet.left(j) == pts[s]) {
                if (k == 1 && j == 0) continue;
                if (!include_origin && j == 0) continue;
                return KeaneViolationRecord{k, static_cast<int>(s) + first + 1, j + 1};
            }
        }
    }
    return std::nullopt;
}

}  // namespace ietflow

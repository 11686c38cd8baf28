#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ietflow/interval_set.hpp"
#include "ietflow/permutation.hpp"
#include "ietflow/scalar.hpp"

namespace ietflow {

/*
 * Interval exchange T on [0, |lambda|). Interval I_k = [left(k), left(k) +
 * lambda_k) is translated by offset(k) so that the images appear in the
 * order given by pi. Immutable after construction.
 */
class Iet {
public:
    /// Validates d >= 2, positive lengths, a common field and irreducibility.
    Iet(Permutation pi, std::vector<Scalar> lambda);

    int size() const noexcept { return pi_.size(); }
    const Permutation& pi() const noexcept { return pi_; }
    const std::vector<Scalar>& lambda() const noexcept { return lambda_; }
    const Scalar& total() const noexcept { return total_; }
    /// Radicand shared by all lengths; 0 when every length is rational.
    long field() const noexcept { return field_; }

    /// Left endpoint of I_k.
    const Scalar& left(int k) const { return left_[static_cast<std::size_t>(k)]; }
    const std::vector<Scalar>& lefts() const noexcept { return left_; }
    /// Left endpoint of the image slot s.
    const Scalar& image_left(int s) const { return image_left_[static_cast<std::size_t>(s)]; }
    const std::vector<Scalar>& image_lefts() const noexcept { return image_left_; }
    const std::vector<Scalar>& offsets() const noexcept { return offset_; }
    const Scalar& offset(int k) const { return offset_[static_cast<std::size_t>(k)]; }
    Interval interval(int k) const;

    /// Index k with x in I_k; x must lie in [0, |lambda|).
    int index_of(const Scalar& x) const;
    /// Index k with x in T(I_k).
    int preimage_index_of(const Scalar& x) const;

    bool in_domain(const Scalar& x) const;
    /// One forward step without a domain check.
    Scalar step(const Scalar& x) const { return x + offset_[static_cast<std::size_t>(index_of(x))]; }
    Scalar step_back(const Scalar& x) const {
        return x - offset_[static_cast<std::size_t>(preimage_index_of(x))];
    }

    /// T^n(x) for any integer n; throws DomainError outside [0, |lambda|).
    Scalar apply(const Scalar& x, std::int64_t n) const;
    /// x, Tx, ..., T^n x (or the backward orbit for n < 0).
    std::vector<Scalar> orbit(const Scalar& x, std::int64_t n) const;
    /// The inverse exchange.
    Iet inverse() const;

private:
    Permutation pi_;
    Permutation pi_inv_;
    std::vector<Scalar> lambda_;
    std::vector<Scalar> left_;
    std::vector<Scalar> image_left_;
    std::vector<Scalar> offset_;
    Scalar total_;
    long field_ = 0;
};

/// Offsets omega_k = sum_{pi(j) < pi(k)} lambda_j - sum_{j < k} lambda_j.
std::vector<Scalar> translation_offsets(const Iet& iet);

struct KeaneViolationRecord {
    std::int64_t k;  // power, >= 1
    int i;           // 1-based source endpoint
    int j;           // 1-based target endpoint
};

/*
 * Searches T^k(dI_i) = dI_j for 1 <= k <= depth in order of k, then i. The
 * coincidence with k = 1 and j = 1 is permitted. With include_origin the
 * sources range over all left endpoints including dI_1 = 0; otherwise over
 * the interior discontinuities dI_2..dI_d only.
 */
std::optional<KeaneViolationRecord> keane_check(const Iet& iet, std::int64_t depth,
                                                bool include_origin = true);

}  // namespace ietflow

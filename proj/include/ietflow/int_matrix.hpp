#pragma once

#include <string>
#include <vector>

#include <gmpxx.h>

#include "ietflow/scalar.hpp"

namespace ietflow {

/// Square matrix of arbitrary-precision integers, row-major.
class IntMatrix {
public:
    IntMatrix() = default;
    explicit IntMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n)) {}
    IntMatrix(int n, const std::vector<std::vector<long>>& rows);
    static IntMatrix identity(int n);

    int size() const noexcept { return n_; }
    mpz_class& operator()(int i, int j) { return a_[idx(i, j)]; }
    const mpz_class& operator()(int i, int j) const { return a_[idx(i, j)]; }

    IntMatrix operator*(const IntMatrix& o) const;
    std::vector<Scalar> operator*(const std::vector<Scalar>& v) const;
    friend bool operator==(const IntMatrix&, const IntMatrix&) = default;

    mpz_class determinant() const;
    /// Exact inverse; throws DomainError unless det = +-1.
    IntMatrix inverse() const;
    std::vector<mpz_class> column_sums() const;
    bool strictly_positive() const;
    bool nonnegative() const;
    /// M with columns reordered: result column c is column perm[c] of M.
    IntMatrix permute_columns(const std::vector<int>& perm) const;
    std::vector<std::vector<std::string>> to_strings() const;

private:
    std::size_t idx(int i, int j) const {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j);
    }
    int n_ = 0;
    std::vector<mpz_class> a_;
};

/// max over rows i and columns j, k of B_ij / B_ik. Throws NonPositiveEntry.
mpq_class balance_ratio(const IntMatrix& B);

}  // namespace ietflow

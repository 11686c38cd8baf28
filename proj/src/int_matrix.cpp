#include "ietflow/int_matrix.hpp"

#include "ietflow/errors.hpp"

namespace ietflow {

IntMatrix::IntMatrix(int n, const std::vector<std::vector<long>>& rows) : IntMatrix(n) {
    if (static_cast<int>(rows.size()) != n) throw InvalidInput("matrix row count mismatch");
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != n) throw InvalidInput("matrix is not square");
        for (int j = 0; j < n; ++j) (*this)(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
}

IntMatrix IntMatrix::identity(int n) {
    IntMatrix m(n);
    for (int i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

IntMatrix IntMatrix::operator*(const IntMatrix& o) const {
    IntMatrix r(n_);
    for (int i = 0; i < n_; ++i)
        for (int k = 0; k < n_; ++k) {
            const mpz_class& x = (*this)(i, k);
            if (x == 0) continue;
            for (int j = 0; j < n_; ++j) r(i, j) += x * o(k, j);
        }
    return r;
}

std::vector<Scalar> IntMatrix::operator*(const std::vector<Scalar>& v) const {
    std::vector<Scalar> out(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) {
            if ((*this)(i, j) == 0) continue;
            out[static_cast<std::size_t>(i)] += Scalar((*this)(i, j)) * v[static_cast<std::size_t>(j)];
        }
    return out;
}

mpz_class IntMatrix::determinant() const {
    // Bareiss fraction-free elimination.
    if (n_ == 0) return 1;
    std::vector<mpz_class> m(a_);
    auto at = [&](int i, int j) -> mpz_class& { return m[idx(i, j)]; };
    int sign = 1;
    mpz_class prev = 1;
    for (int k = 0; k < n_ - 1; ++k) {
        if (at(k, k) == 0) {
            int p = k + 1;
            while (p < n_ && at(p, k) == 0) ++p;
            if (p == n_) return 0;
            for (int j = 0; j < n_; ++j) std::swap(at(k, j), at(p, j));
            sign = -sign;
        }
        for (int i = k + 1; i < n_; ++i)
            for (int j = k + 1; j < n_; ++j) {
                at(i, j) = (at(i, j) * at(k, k) - at(i, k) * at(k, j));
                mpz_divexact(at(i, j).get_mpz_t(), at(i, j).get_mpz_t(), prev.get_mpz_t());
            }
        prev = at(k, k);
    }
    return sign * at(n_ - 1, n_ - 1);
}

IntMatrix IntMatrix::inverse() const {
    std::vector<mpq_class> m(static_cast<std::size_t>(n_) * static_cast<std::size_t>(2 * n_));
    const std::size_t w = static_cast<std::size_t>(2 * n_);
    auto at = [&](int i, int j) -> mpq_class& { return m[static_cast<std::size_t>(i) * w + static_cast<std::size_t>(j)]; };
    for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < n_; ++j) at(i, j) = (*this)(i, j);
        at(i, n_ + i) = 1;
    }
    for (int c = 0; c < n_; ++c) {
        int p = c;
        while (p < n_ && at(p, c) == 0) ++p;
        if (p == n_) throw DomainError("singular matrix");
        if (p != c)
            for (int j = 0; j < 2 * n_; ++j) std::swap(at(p, j), at(c, j));
        const mpq_class piv = at(c, c);
        for (int j = 0; j < 2 * n_; ++j) at(c, j) /= piv;
        for (int i = 0; i < n_; ++i) {
            if (i == c || at(i, c) == 0) continue;
            const mpq_class f = at(i, c);
            for (int j = 0; j < 2 * n_; ++j) at(i, j) -= f * at(c, j);
        }
    }
    IntMatrix r(n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) {
            const mpq_class& v = at(i, n_ + j);
            if (v.get_den() != 1) throw DomainError("inverse is not integral");
            r(i, j) = v.get_num();
        }
    return r;
}

std::vector<mpz_class> IntMatrix::column_sums() const {
    std::vector<mpz_class> s(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) s[static_cast<std::size_t>(j)] += (*this)(i, j);
    return s;
}

bool IntMatrix::strictly_positive() const {
    for (const mpz_class& x : a_)
        if (x <= 0) return false;
    return true;
}

bool IntMatrix::nonnegative() const {
    for (const mpz_class& x : a_)
        if (x < 0) return false;
    return true;
}

IntMatrix IntMatrix::permute_columns(const std::vector<int>& perm) const {
    IntMatrix r(n_);
    for (int i = 0; i < n_; ++i)
        for (int c = 0; c < n_; ++c) r(i, c) = (*this)(i, perm[static_cast<std::size_t>(c)]);
    return r;
}

std::vector<std::vector<std::string>> IntMatrix::to_strings() const {
    std::vector<std::vector<std::string>> out(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) out[static_cast<std::size_t>(i)].push_back((*this)(i, j).get_str());
    return out;
}

mpq_class balance_ratio(const IntMatrix& B) {
    if (!B.strictly_positive()) throw NonPositiveEntry("balance ratio needs a strictly positive matrix");
    mpq_class best = 0;
    for (int i = 0; i < B.size(); ++i) {
        mpz_class mx = B(i, 0), mn = B(i, 0);
        for (int j = 1; j < B.size(); ++j) {
            if (B(i, j) > mx) mx = B(i, j);
            if (B(i, j) < mn) mn = B(i, j);
        }
        mpq_class r(mx, mn);
        r.canonicalize();
        if (r > best) best = r;
    }
    return best;
}

}  // namespace ietflow

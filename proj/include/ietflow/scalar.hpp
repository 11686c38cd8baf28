#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace ietflow {

/// Certified double enclosure lo <= value <= hi.
struct Enclosure {
    double lo;
    double hi;
};

/*
 * Exact element of Q or of a real quadratic field Q(sqrt(D)).
 *
 * A value is a + b*sqrt(D) with a, b rational and D a square-free integer
 * >= 2. Rational values carry b == 0 and radicand() == 0; they combine with
 * any field. Combining two irrational values from different fields throws
 * FieldMismatch.
 *
 * Text form: "p", "p/q", "-3/2", "0.25", "sqrt(5)", "1/2*sqrt(5)",
 * "3/2-1/2*sqrt(5)", "sqrt(5)-2". str() always emits a form parse() reads
 * back.
 */
class Scalar {
public:
    Scalar() = default;
    Scalar(long n) : a_(n) { refresh(); }  // NOLINT(google-explicit-constructor)
    Scalar(int n) : a_(n) { refresh(); }   // NOLINT(google-explicit-constructor)
    explicit Scalar(const mpz_class& n) : a_(n) { refresh(); }
    explicit Scalar(mpq_class q);
    Scalar(long num, long den);

    /// a + b*sqrt(D); D must be square-free and >= 2.
    static Scalar quadratic(mpq_class a, mpq_class b, long D);
    static Scalar sqrt_of(long D) { return quadratic(0, 1, D); }
    static Scalar parse(std::string_view text);
    /// Exact value of a finite double.
    static Scalar from_double(double v);

    const mpq_class& rational_part() const noexcept { return a_; }
    const mpq_class& radical_coeff() const noexcept { return b_; }
    /// 0 for rationals.
    long radicand() const noexcept { return D_; }
    bool is_rational() const noexcept { return D_ == 0; }
    bool is_zero() const noexcept { return D_ == 0 && sgn(a_) == 0; }

    int sign() const;
    Scalar abs() const { return sign() < 0 ? -*this : *this; }
    double to_double() const;
    Enclosure enclose() const;
    std::string str() const;

    Scalar operator-() const;
    Scalar& operator+=(const Scalar& o);
    Scalar& operator-=(const Scalar& o);
    Scalar& operator*=(const Scalar& o);
    Scalar& operator/=(const Scalar& o);

    friend Scalar operator+(Scalar x, const Scalar& y) { return x += y; }
    friend Scalar operator-(Scalar x, const Scalar& y) { return x -= y; }
    friend Scalar operator*(Scalar x, const Scalar& y) { return x *= y; }
    friend Scalar operator/(Scalar x, const Scalar& y) { return x /= y; }

    friend bool operator==(const Scalar& x, const Scalar& y);
    friend std::strong_ordering operator<=>(const Scalar& x, const Scalar& y);

private:
    void normalize() {
        if (sgn(b_) == 0) D_ = 0;
        refresh();
    }
    /// Recomputes the cached enclosure mid_ +- rad_.
    void refresh();
    friend int compare(const Scalar& x, const Scalar& y);
    long common_radicand(const Scalar& o) const;

    mpq_class a_{0};
    mpq_class b_{0};
    long D_ = 0;
    double mid_ = 0.0;
    double rad_ = 0x1p-1000;
};

Scalar min(const Scalar& x, const Scalar& y);
Scalar max(const Scalar& x, const Scalar& y);

std::ostream& operator<<(std::ostream& os, const Scalar& s);

/// Fast approximate sign test with a floating-point filter; exact fallback.
int compare(const Scalar& x, const Scalar& y);

/// Square-free test used by the parser.
bool is_square_free(long n);

}  // namespace ietflow

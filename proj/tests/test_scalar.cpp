#include <doctest.h>

#include <cmath>
#include <random>

#include "ietflow/errors.hpp"
#include "ietflow/scalar.hpp"

using ietflow::Scalar;

TEST_SUITE("scalar") {
TEST_CASE("parse and print round-trip") {
    for (const char* s : {"0", "7", "-3/2", "1/2*sqrt(5)", "3/2-1/2*sqrt(5)", "sqrt(2)", "-sqrt(3)",
                          "-1/3+sqrt(7)", "5/7*sqrt(10)"}) {
        Scalar x = Scalar::parse(s);
        CHECK(x.str() == s);
        CHECK(Scalar::parse(x.str()) == x);
    }
    CHECK(Scalar::parse("0.25") == Scalar(1, 4));
    CHECK(Scalar::parse("4/6") == Scalar(2, 3));
    CHECK(Scalar::parse(" 1 + 2*sqrt(5) ") == Scalar::quadratic(1, 2, 5));
    CHECK(Scalar::parse("3/2-sqrt(5)") == Scalar::quadratic(mpq_class(3, 2), -1, 5));
}

TEST_CASE("parse rejects malformed input") {
    for (const char* s : {"", "abc", "1/0", "sqrt(4)", "sqrt(1)", "1+sqrt(12)", "2*sqrt(5", "1/2/3", "--1"}) {
        CHECK_THROWS_AS(Scalar::parse(s), ietflow::InvalidInput);
    }
}

TEST_CASE("field arithmetic is exact") {
    Scalar phi = (Scalar(1) + Scalar::sqrt_of(5)) / Scalar(2);
    CHECK(phi * phi == phi + Scalar(1));
    CHECK((Scalar(1) / phi) == phi - Scalar(1));
    Scalar r = Scalar::sqrt_of(5) - Scalar::sqrt_of(5);
    CHECK(r.is_rational());
    CHECK(r.is_zero());
    CHECK_THROWS_AS(Scalar::sqrt_of(2) + Scalar::sqrt_of(3), ietflow::FieldMismatch);
    CHECK_THROWS_AS(Scalar(1) / Scalar(0), ietflow::DomainError);
    CHECK((Scalar(1, 3) + Scalar::sqrt_of(2)).radicand() == 2);
}

TEST_CASE("sign and ordering agree with high-precision evaluation") {
    // Values a + b sqrt(2) with a/b close to -sqrt(2); the conjugate norm
    // a^2 - 2 b^2 = +-1 decides the sign (Pell pairs).
    mpz_class p = 1, q = 1;  // p^2 - 2 q^2 = -1
    for (int i = 0; i < 40; ++i) {
        Scalar x = Scalar::quadratic(mpq_class(p), mpq_class(-q), 2);  // p - q sqrt2 < 0 since p^2 < 2 q^2
        const int expected = (p * p - 2 * q * q) > 0 ? 1 : -1;
        CHECK(x.sign() == expected);
        CHECK((-x).sign() == -expected);
        mpz_class np = p + 2 * q, nq = p + q;
        p = np;
        q = nq;
    }
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<long> dist(-1000, 1000);
    for (int i = 0; i < 500; ++i) {
        Scalar x = Scalar::quadratic(dist(rng), dist(rng) | 1, 5);
        Scalar y = Scalar::quadratic(dist(rng), dist(rng) | 1, 5);
        const double dx = x.to_double(), dy = y.to_double();
        if (std::abs(dx - dy) > 1e-6) CHECK((compare(x, y) < 0) == (dx < dy));
        CHECK(compare(x, x) == 0);
        CHECK((x < y) != (y <= x));
        auto e = x.enclose();
        CHECK(e.lo <= dx);
        CHECK(dx <= e.hi);
    }
}

TEST_CASE("from_double is exact") {
    CHECK(Scalar::from_double(0.5) == Scalar(1, 2));
    CHECK(Scalar::from_double(0.1) != Scalar(1, 10));
}

TEST_CASE("to_double under cancellation") {
    // (1-sqrt(2))^40 as 2a - (1+sqrt(2))^40: both terms near 2e15.
    Scalar u = Scalar::parse("1+sqrt(2)");
    Scalar p(1);
    for (int i = 0; i < 40; ++i) p *= u;
    Scalar conj = Scalar(mpq_class(p.rational_part() * 2)) - p;  // (1-sqrt(2))^40
    mpf_class r(2, 512), pw(1, 512);
    r = sqrt(r) - 1;
    for (int i = 0; i < 40; ++i) pw *= r;
    const double expect = pw.get_d();
    CHECK(conj.to_double() == doctest::Approx(expect).epsilon(1e-12));
    const auto e = conj.enclose();
    CHECK(e.lo <= expect);
    CHECK(e.hi >= expect);
    CHECK(e.hi - e.lo < expect * 1e-10);
}
}

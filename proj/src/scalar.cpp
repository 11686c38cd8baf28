#include "ietflow/scalar.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <ostream>

#include "ietflow/errors.hpp"

namespace ietflow {

namespace {

struct Approx {
    double mid;
    double rad;  // |value - mid| <= rad
};

// get_d truncates (relative error below 2^-52) and sqrt/*/+ are correctly
// rounded, so a 2^-50 relative slack plus a subnormal floor is a safe radius.
Approx approximate(const mpq_class& a, const mpq_class& b, long D) {
    const double ad = a.get_d();
    if (D == 0) {
        if (!std::isfinite(ad)) return {0.0, std::numeric_limits<double>::infinity()};
        return {ad, std::fabs(ad) * 0x1p-50 + 0x1p-1000};
    }
    const double bd = b.get_d();
    const double prod = bd * std::sqrt(static_cast<double>(D));
    const double sum = ad + prod;
    if (!std::isfinite(sum) || !std::isfinite(prod)) {
        return {0.0, std::numeric_limits<double>::infinity()};
    }
    return {sum, (std::fabs(ad) + std::fabs(prod) + std::fabs(sum)) * 0x1p-50 + 0x1p-1000};
}

// Recomputes a + b sqrt(D) in multiprecision until cancellation no longer
// eats the double mantissa.
Approx refine(const mpq_class& a, const mpq_class& b, long D) {
    for (mp_bitcnt_t prec = 128;; prec *= 2) {
        const mpf_class af(a, prec), bf(b, prec);
        mpf_class root(D, prec);
        root = sqrt(root);
        const mpf_class prod = bf * root;
        const mpf_class sum = af + prod;
        mpf_class err = (abs(af) + abs(prod)) * 4;
        mpf_div_2exp(err.get_mpf_t(), err.get_mpf_t(), prec);
        mpf_class scaled = err;
        mpf_mul_2exp(scaled.get_mpf_t(), scaled.get_mpf_t(), 53);
        if (abs(sum) > scaled || prec >= 1 << 16) {
            const double mid = sum.get_d();
            const double rad = err.get_d() + std::fabs(mid) * 0x1p-52 + 0x1p-1000;
            if (!std::isfinite(mid)) return {0.0, std::numeric_limits<double>::infinity()};
            return {mid, rad};
        }
    }
}

int exact_sign(const mpq_class& a, const mpq_class& b, long D) {
    const int sa = sgn(a);
    const int sb = sgn(b);
    if (sb == 0 || D == 0) return sa;
    if (sa == 0) return sb;
    if (sa == sb) return sa;
    // Opposite signs: the term of larger square wins.
    const mpq_class a2 = a * a;
    const mpq_class b2d = b * b * D;
    const int c = cmp(a2, b2d);
    if (c == 0) return 0;  // unreachable for square-free D
    return c > 0 ? sa : sb;
}

mpq_class parse_rational(std::string_view s, std::string_view whole) {
    auto fail = [&]() -> mpq_class {
        throw InvalidInput("cannot parse scalar '" + std::string(whole) + "'");
    };
    if (s.empty()) return fail();
    bool neg = false;
    std::size_t i = 0;
    if (s[0] == '+' || s[0] == '-') {
        neg = s[0] == '-';
        i = 1;
    }
    std::string_view body = s.substr(i);
    if (body.empty()) return fail();
    mpq_class out;
    const auto slash = body.find('/');
    const auto dot = body.find('.');
    auto all_digits = [](std::string_view t) {
        if (t.empty()) return false;
        for (char c : t)
            if (!std::isdigit(static_cast<unsigned char>(c))) return false;
        return true;
    };
    if (slash != std::string_view::npos) {
        auto num = body.substr(0, slash);
        auto den = body.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den)) return fail();
        mpz_class n(std::string(num), 10), d(std::string(den), 10);
        if (d == 0) throw InvalidInput("zero denominator in '" + std::string(whole) + "'");
        out = mpq_class(n, d);
        out.canonicalize();
    } else if (dot != std::string_view::npos) {
        auto ip = body.substr(0, dot);
        auto fp = body.substr(dot + 1);
        if (ip.empty()) ip = "0";
        if (!all_digits(ip) || !all_digits(fp)) return fail();
        mpz_class n(std::string(ip) + std::string(fp), 10);
        mpz_class d;
        mpz_ui_pow_ui(d.get_mpz_t(), 10, fp.size());
        out = mpq_class(n, d);
        out.canonicalize();
    } else {
        if (!all_digits(body)) return fail();
        out = mpq_class(mpz_class(std::string(body), 10));
    }
    return neg ? mpq_class(-out) : out;
}

}  // namespace

bool is_square_free(long n) {
    if (n < 1) return false;
    for (long p = 2; p <= n / p; ++p) {
        if (n % (p * p) == 0) return false;
    }
    return true;
}

Scalar::Scalar(mpq_class q) : a_(std::move(q)) {
    a_.canonicalize();
    refresh();
}

void Scalar::refresh() {
    const Approx ap = approximate(a_, b_, D_);
    mid_ = ap.mid;
    rad_ = ap.rad;
}

Scalar::Scalar(long num, long den) {
    if (den == 0) throw DomainError("zero denominator");
    a_ = mpq_class(num, den);
    a_.canonicalize();
    refresh();
}

Scalar Scalar::quadratic(mpq_class a, mpq_class b, long D) {
    if (D < 2 || !is_square_free(D)) {
        throw InvalidInput("radicand " + std::to_string(D) + " is not a square-free integer >= 2");
    }
    Scalar s;
    s.a_ = std::move(a);
    s.b_ = std::move(b);
    s.a_.canonicalize();
    s.b_.canonicalize();
    s.D_ = D;
    s.normalize();
    return s;
}

Scalar Scalar::from_double(double v) {
    if (!std::isfinite(v)) throw DomainError("non-finite double");
    return Scalar(mpq_class(v));
}

Scalar Scalar::parse(std::string_view text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    const auto pos = s.find("sqrt(");
    if (pos == std::string::npos) return Scalar(parse_rational(s, text));

    const auto close = s.find(')', pos);
    if (close == std::string::npos) throw InvalidInput("cannot parse scalar '" + std::string(text) + "'");
    // A rational term may also follow the radical: "b*sqrt(D)+a".
    const std::string tail = s.substr(close + 1);
    if (!tail.empty() && tail[0] != '+' && tail[0] != '-') {
        throw InvalidInput("cannot parse scalar '" + std::string(text) + "'");
    }
    const std::string dstr = s.substr(pos + 5, close - pos - 5);
    if (dstr.empty() || dstr.size() > 18) throw InvalidInput("bad radicand in '" + std::string(text) + "'");
    for (char c : dstr)
        if (!std::isdigit(static_cast<unsigned char>(c))) {
            throw InvalidInput("bad radicand in '" + std::string(text) + "'");
        }
    const long D = std::stol(dstr);

    std::string pre = s.substr(0, pos);
    bool explicit_coeff = false;
    if (!pre.empty() && pre.back() == '*') {
        pre.pop_back();
        explicit_coeff = true;
    }
    // Split "a{+,-}b" at the last sign that is not leading and not part of
    // an exponent; without '*' the coefficient of sqrt is +-1.
    std::size_t split = std::string::npos;
    for (std::size_t i = pre.size(); i-- > 1;) {
        if (pre[i] == '+' || pre[i] == '-') {
            split = i;
            break;
        }
    }
    std::string astr, bstr;
    if (split == std::string::npos) {
        bstr = pre;
    } else {
        astr = pre.substr(0, split);
        bstr = pre.substr(split);
    }
    if (!tail.empty() && !astr.empty()) throw InvalidInput("cannot parse scalar '" + std::string(text) + "'");
    if (!tail.empty()) astr = tail;
    mpq_class a = astr.empty() ? mpq_class(0) : parse_rational(astr, text);
    mpq_class b;
    if (!explicit_coeff) {
        if (bstr.empty() || bstr == "+") {
            b = 1;
        } else if (bstr == "-") {
            b = -1;
        } else {
            throw InvalidInput("cannot parse scalar '" + std::string(text) + "'");
        }
    } else {
        b = parse_rational(bstr, text);
    }
    return quadratic(std::move(a), std::move(b), D);
}

int Scalar::sign() const {
    if (std::fabs(mid_) > rad_) return mid_ > 0 ? 1 : -1;
    return exact_sign(a_, b_, D_);
}

double Scalar::to_double() const {
    if (D_ == 0 || rad_ <= std::fabs(mid_) * 0x1p-40) return mid_;
    return refine(a_, b_, D_).mid;
}

Enclosure Scalar::enclose() const {
    Approx ap{mid_, rad_};
    if (D_ != 0 && std::isfinite(rad_) && rad_ > std::fabs(mid_) * 0x1p-40) ap = refine(a_, b_, D_);
    if (!std::isfinite(ap.rad)) {
        return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    }
    return {ap.mid - ap.rad * 2, ap.mid + ap.rad * 2};
}

std::string Scalar::str() const {
    if (D_ == 0) return a_.get_str();
    std::string out;
    const std::string root = "sqrt(" + std::to_string(D_) + ")";
    const mpq_class babs = ::abs(b_);
    std::string bpart = (babs == 1) ? root : babs.get_str() + "*" + root;
    if (sgn(a_) == 0) {
        return (sgn(b_) < 0 ? "-" : "") + bpart;
    }
    return a_.get_str() + (sgn(b_) < 0 ? "-" : "+") + bpart;
}

long Scalar::common_radicand(const Scalar& o) const {
    if (D_ == 0) return o.D_;
    if (o.D_ == 0 || o.D_ == D_) return D_;
    throw FieldMismatch("cannot combine sqrt(" + std::to_string(D_) + ") and sqrt(" +
                        std::to_string(o.D_) + ")");
}

Scalar Scalar::operator-() const {
    Scalar s = *this;
    s.a_ = -s.a_;
    s.b_ = -s.b_;
    s.mid_ = -s.mid_;
    return s;
}

Scalar& Scalar::operator+=(const Scalar& o) {
    D_ = common_radicand(o);
    a_ += o.a_;
    b_ += o.b_;
    normalize();
    return *this;
}

Scalar& Scalar::operator-=(const Scalar& o) {
    D_ = common_radicand(o);
    a_ -= o.a_;
    b_ -= o.b_;
    normalize();
    return *this;
}

Scalar& Scalar::operator*=(const Scalar& o) {
    const long D = common_radicand(o);
    if (D == 0) {
        a_ *= o.a_;
        refresh();
        return *this;
    }
    mpq_class na = a_ * o.a_ + b_ * o.b_ * D;
    mpq_class nb = a_ * o.b_ + b_ * o.a_;
    a_ = std::move(na);
    b_ = std::move(nb);
    D_ = D;
    normalize();
    return *this;
}

Scalar& Scalar::operator/=(const Scalar& o) {
    if (o.is_zero()) throw DomainError("division by zero");
    const long D = common_radicand(o);
    if (D == 0 || sgn(o.b_) == 0) {
        a_ /= o.a_;
        b_ /= o.a_;
        D_ = D;
        normalize();
        return *this;
    }
    const mpq_class norm = o.a_ * o.a_ - o.b_ * o.b_ * D;
    mpq_class na = (a_ * o.a_ - b_ * o.b_ * D) / norm;
    mpq_class nb = (b_ * o.a_ - a_ * o.b_) / norm;
    a_ = std::move(na);
    b_ = std::move(nb);
    D_ = D;
    normalize();
    return *this;
}

bool operator==(const Scalar& x, const Scalar& y) {
    return x.D_ == y.D_ && x.a_ == y.a_ && x.b_ == y.b_;
}

int compare(const Scalar& x, const Scalar& y) {
    const double gap = x.mid_ - y.mid_;
    if (std::isfinite(gap) && std::fabs(gap) > (x.rad_ + y.rad_) * 1.0000001 + 0x1p-1000) {
        return gap > 0 ? 1 : -1;
    }
    return (x - y).sign();
}

std::strong_ordering operator<=>(const Scalar& x, const Scalar& y) {
    const int c = compare(x, y);
    if (c < 0) return std::strong_ordering::less;
    if (c > 0) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

Scalar min(const Scalar& x, const Scalar& y) { return compare(x, y) <= 0 ? x : y; }
Scalar max(const Scalar& x, const Scalar& y) { return compare(x, y) >= 0 ? x : y; }

std::ostream& operator<<(std::ostream& os, const Scalar& s) { return os << s.str(); }

}  // namespace ietflow

#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "ietflow/errors.hpp"
#include "ietflow/iet.hpp"
#include "ietflow/rauzy.hpp"

using namespace ietflow;

namespace {

std::vector<Scalar> golden_lambda() {
    return {Scalar::parse("3/2-1/2*sqrt(5)"), Scalar::parse("-1/2+1/2*sqrt(5)")};
}

Permutation P(std::vector<int> v) { return Permutation::from_one_based(v); }

Permutation random_irreducible(std::mt19937_64& rng, int d) {
    std::vector<int> img(static_cast<std::size_t>(d));
    for (;;) {
        for (int i = 0; i < d; ++i) img[static_cast<std::size_t>(i)] = i;
        std::shuffle(img.begin(), img.end(), rng);
        Permutation p(img);
        if (is_irreducible(p)) return p;
    }
}

// First-return data of T to [0, |lambda^n|) by direct orbit simulation.
void check_first_return(const Iet& t, const InductionTrace& tr) {
    const auto lam = tr.lambda_n_domain();
    Iet induced(tr.pi_n(), lam);
    const IntMatrix a = tr.cumulative_domain();
    const int d = t.size();
    for (int p = 0; p < d; ++p) {
        for (const Scalar& x : {induced.left(p), induced.left(p) + lam[static_cast<std::size_t>(p)] / Scalar(3)}) {
            std::vector<long> visits(static_cast<std::size_t>(d), 0);
            Scalar y = x;
            long k = 0;
            do {
                ++visits[static_cast<std::size_t>(t.index_of(y))];
                y = t.step(y);
                ++k;
            } while (!(y < induced.total()));
            CHECK(y == induced.apply(x, 1));
            for (int i = 0; i < d; ++i) CHECK(a(i, p) == visits[static_cast<std::size_t>(i)]);
            CHECK(a.column_sums()[static_cast<std::size_t>(p)] == k);
        }
    }
}

}  // namespace

TEST_SUITE("rauzy") {
TEST_CASE("single steps") {
    auto s = induction_step(P({2, 1}), {Scalar(1, 3), Scalar(2, 3)});
    CHECK(s.kind == StepKind::Bottom);
    CHECK(s.result_lambda == std::vector<Scalar>{Scalar(1, 3), Scalar(1, 3)});
    CHECK(s.result_pi == P({2, 1}));
    CHECK(s.matrix == IntMatrix(2, {{1, 0}, {1, 1}}));
    CHECK(s.matrix * s.result_lambda == std::vector<Scalar>{Scalar(1, 3), Scalar(2, 3)});
    CHECK_THROWS_AS(induction_step(P({2, 1}), {Scalar(1, 3), Scalar(1, 3)}), KeaneViolation);

    auto g = induction_step(P({2, 1}), golden_lambda());
    CHECK(g.result_lambda[0] == Scalar::parse("3/2-1/2*sqrt(5)"));
    CHECK(g.result_lambda[1] == Scalar::parse("sqrt(5)-2"));
    CHECK(g.result_pi == P({2, 1}));
    CHECK(g.matrix.determinant() == 1);
}

TEST_CASE("induct") {
    auto t = induct(P({2, 1}), golden_lambda(), 2);
    CHECK(t.cumulative() == IntMatrix(2, {{1, 1}, {1, 2}}));
    CHECK(t.pi_n() == P({2, 1}));
    auto one = induct(P({2, 1}), golden_lambda(), 1);
    auto step = induction_step(P({2, 1}), golden_lambda());
    CHECK(one.cumulative() == step.matrix);
    CHECK(one.lambda_n() == step.result_lambda);
    auto zero = induct(P({2, 1}), golden_lambda(), 0);
    CHECK(zero.cumulative() == IntMatrix::identity(2));
    try {
        induct(P({2, 1}), {Scalar(1, 3), Scalar(2, 3)}, 2);
        FAIL("expected a tie");
    } catch (const KeaneViolationWithTrace& e) {
        CHECK(e.at_step() == 2);
        CHECK(e.partial().n() == 1);
    }
}

TEST_CASE("normalized step") {
    auto [p, l] = normalized_step(P({2, 1}), {Scalar(1, 3), Scalar(2, 3)});
    CHECK(p == P({2, 1}));
    CHECK(l == std::vector<Scalar>{Scalar(1, 2), Scalar(1, 2)});
    auto [pg, lg] = normalized_step(P({2, 1}), golden_lambda());
    CHECK(lg[0] + lg[1] == Scalar(1));
    Scalar s;
    for (auto& x : lg) s += x;
    std::vector<Scalar> again = lg;
    for (auto& x : again) x /= s;
    CHECK(again == lg);
}

TEST_CASE("balance ratio") {
    CHECK(balance_ratio(IntMatrix(2, {{2, 1}, {1, 1}})) == 2);
    CHECK(balance_ratio(IntMatrix(3, {{1, 1, 1}, {1, 1, 1}, {1, 1, 1}})) == 1);
    CHECK(balance_ratio(IntMatrix(2, {{1, 1}, {1, 2}})) == 2);
    CHECK_THROWS_AS(balance_ratio(IntMatrix(2, {{1, 0}, {1, 1}})), NonPositiveEntry);
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const int d = 2 + trial % 3;
        IntMatrix a(d), b(d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                a(i, j) = static_cast<long>(rng() % 4);
                b(i, j) = static_cast<long>(rng() % 9 + 1);
            }
        for (int i = 0; i < d; ++i) a(i, i) += 1;
        if (a.determinant() == 0) continue;
        const mpq_class rb = balance_ratio(b);
        CHECK(balance_ratio(a * b) <= rb);
        auto cs = b.column_sums();
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k) CHECK(mpq_class(cs[static_cast<std::size_t>(j)]) <= rb * cs[static_cast<std::size_t>(k)]);
    }
}

TEST_CASE("trace invariants and first-return oracle") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 40; ++trial) {
        const int d = 2 + trial % 3;
        Permutation pi = random_irreducible(rng, d);
        std::vector<Scalar> lam;
        for (int i = 0; i < d; ++i) lam.emplace_back(static_cast<long>(rng() % 1000 + 1), static_cast<long>(rng() % 1000 + 1));
        Iet t(pi, lam);
        InductionTrace tr(pi, lam);
        for (int n = 0; n < 8; ++n) {
            try {
                tr.extend(1);
            } catch (const KeaneViolation&) {
                break;
            }
            CHECK(tr.cumulative() * tr.lambda_n() == lam);
            CHECK(tr.cumulative().determinant() == 1);
            CHECK(tr.cumulative().nonnegative());
            check_first_return(t, tr);
        }
    }
}

TEST_CASE("quadratic lengths respect the invariants") {
    std::vector<Scalar> lam{Scalar::parse("1/7+1/11*sqrt(5)"), Scalar::parse("2/9"),
                            Scalar::parse("1/3-1/13*sqrt(5)"), Scalar::parse("1/5*sqrt(5)-1/4")};
    Permutation pi = P({4, 3, 2, 1});
    Iet t(pi, lam);
    auto tr = induct(pi, lam, 30);
    CHECK(tr.cumulative() * tr.lambda_n() == lam);
    CHECK(tr.cumulative().determinant() == 1);
    check_first_return(t, tr);
    auto [n, pos] = find_positive_return(pi, lam, 64);
    CHECK(pos.cumulative().strictly_positive());
    CHECK(pos.pi_n() == pi);
    CHECK(n == pos.n());
}

TEST_CASE("positive return") {
    auto [n, t] = find_positive_return(P({2, 1}), golden_lambda(), 10);
    CHECK(n == 2);
    CHECK(t.cumulative() == IntMatrix(2, {{1, 1}, {1, 2}}));
    CHECK_THROWS_AS(find_positive_return(P({2, 1}), golden_lambda(), 1), NotFound);
}

TEST_CASE("matrix consistency under rescaled inputs") {
    // A^k(pi, A^n lambda') = A^k(pi, lambda) for k <= n.
    std::vector<Scalar> lam{Scalar::parse("1/7+1/11*sqrt(5)"), Scalar::parse("2/9"), Scalar::parse("1/3-1/13*sqrt(5)")};
    Permutation pi = P({3, 2, 1});
    const int n = 9;
    auto base = induct(pi, lam, n);
    std::vector<Scalar> other{Scalar(1, 2), Scalar::parse("1/5*sqrt(5)"), Scalar(3, 7)};
    auto mixed = base.cumulative() * other;
    for (int k = 0; k <= n; ++k) {
        auto a = induct(pi, lam, k);
        auto b = induct(pi, mixed, k);
        CHECK(a.cumulative() == b.cumulative());
        CHECK(a.pi_n() == b.pi_n());
    }
    CHECK(induct(pi, mixed, n).lambda_n() == other);
}

TEST_CASE("rauzy classes") {
    CHECK(rauzy_class(P({2, 1})) == std::vector<Permutation>{P({2, 1})});
    auto c3 = rauzy_class(P({3, 2, 1}));
    CHECK(c3.size() == 3);
    // The hyperelliptic class of the reversal on d letters has 2^(d-1) - 1 elements.
    CHECK(rauzy_class(P({4, 3, 2, 1})).size() == 7);
    CHECK(rauzy_class(P({5, 4, 3, 2, 1})).size() == 15);
    for (const Permutation& start : {P({3, 2, 1}), P({4, 3, 2, 1}), P({3, 1, 4, 2}), P({5, 3, 1, 4, 2})}) {
        auto cls = rauzy_class(start);
        std::set<Permutation> s(cls.begin(), cls.end());
        bool has_standard = false;
        for (const Permutation& p : cls) {
            CHECK(is_irreducible(p));
            CHECK(s.count(rauzy_move(p, StepKind::Top)));
            CHECK(s.count(rauzy_move(p, StepKind::Bottom)));
            const int d = p.size();
            has_standard |= p(0) == d - 1 && p(d - 1) == 0;
        }
        CHECK(has_standard);
    }
}

TEST_CASE("recurrence search") {
    auto all = recurrence_search(P({2, 1}), golden_lambda(),
                                 [](const Permutation&, const std::vector<Scalar>&) { return true; }, 100, 5);
    CHECK(all == std::vector<std::int64_t>{1, 2, 3, 4, 5});
    auto none = recurrence_search(
        P({2, 1}), golden_lambda(),
        [](const Permutation&, const std::vector<Scalar>& l) { return l[0] > Scalar(9, 10); }, 30, 10);
    CHECK(none.empty());
    std::vector<Scalar> lam{Scalar::parse("1/7+1/11*sqrt(5)"), Scalar::parse("2/9"),
                            Scalar::parse("1/3-1/13*sqrt(5)"), Scalar::parse("1/5*sqrt(5)-1/4")};
    Permutation target = P({4, 1, 3, 2});
    auto cls = rauzy_class(P({4, 3, 2, 1}));
    REQUIRE(std::count(cls.begin(), cls.end(), target) == 1);
    auto hits = recurrence_search(P({4, 3, 2, 1}), lam,
                                  [&](const Permutation& p, const std::vector<Scalar>&) { return p == target; }, 200, 3);
    CHECK_FALSE(hits.empty());
}
}

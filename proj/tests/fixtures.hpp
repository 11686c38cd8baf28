#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "ietflow/criterion.hpp"
#include "ietflow/towers.hpp"

namespace fixtures {

using namespace ietflow;

inline Iet golden() {
    return Iet(Permutation::from_one_based({2, 1}),
               {Scalar::parse("3/2-1/2*sqrt(5)"), Scalar::parse("-1/2+1/2*sqrt(5)")});
}

/// Rotation with lambda_1/lambda_2 = 7+3*sqrt(7) = [14; 1, 14, 1, ...]; recurs into Y for eps = 2/5.
inline Iet recurrent_rotation() {
    const Scalar x = Scalar::parse("7+3*sqrt(7)");
    return Iet(Permutation::from_one_based({2, 1}), {x / (x + Scalar(1)), Scalar(1) / (x + Scalar(1))});
}

/// Preperiod [1; 1] followed by the recurrent rotation's expansion; inducing uses the latter's B.
inline Iet shifted_rotation() {
    const Scalar y = Scalar::parse("7+3*sqrt(7)");
    const Scalar x = Scalar(1) + Scalar(1) / (Scalar(1) + Scalar(1) / y);
    return Iet(Permutation::from_one_based({2, 1}), {x / (x + Scalar(1)), Scalar(1) / (x + Scalar(1))});
}

inline TowerOptions shifted_rotation_options(int towers = 3) {
    TowerOptions o;
    o.max_towers = towers;
    o.lambda0 = recurrent_rotation().lambda();
    return o;
}

inline PiecewiseRoof linear_roof() { return PiecewiseRoof(PiecewiseAffine::linear(1, 1)); }

inline PiecewiseRoof two_slope_roof() {
    return PiecewiseRoof({{Scalar(0), Scalar(1), Scalar(2)}, {Scalar(1, 2), Scalar(2), Scalar(-1)}});
}

struct ConstantCase {
    Iet iet;
    mpq_class epsilon;
    std::vector<Scalar> y;  // the target point of Y
};

/*
 * d = 4, pi = (4 3 2 1). B is the first positive return along a generic
 * seed and lambda is proportional to B B y with y in Y, so R^m lands in
 * the B-cone over Y and the first tower sits at depth 2m.
 */
inline ConstantCase constant_case(int r = 3) {
    const Permutation p0 = Permutation::from_one_based({4, 3, 2, 1});
    const Scalar s2 = Scalar::sqrt_of(2);
    const std::vector<Scalar> seed{Scalar(1, 4) + s2 / Scalar(100), Scalar(1, 4) - s2 / Scalar(200),
                                   Scalar(1, 4) + s2 / Scalar(300),
                                   Scalar(1, 4) - s2 / Scalar(100) + s2 / Scalar(200) - s2 / Scalar(300)};
    auto [m, tr] = find_positive_return(p0, seed, 1000);
    const IntMatrix B = tr.cumulative_domain();
    const mpq_class rho = balance_ratio(B);
    const mpq_class bound = constant_epsilon_bound(rho, r);
    mpq_class eps(mpz_class(bound.get_num() * 9000 / bound.get_den()), 10000);
    eps.canonicalize();
    const auto [delta, dprime] = choose_deltas_constant(eps, rho, r);
    const Scalar dl(delta), dp(dprime), w = (dl - dp) / Scalar(4), h(1, 2), g = s2 - Scalar(1);
    const Scalar y1 = h - dl + w * g;
    const Scalar y4 = h + dp + w * (Scalar(1) - g) / Scalar(2);
    const Scalar rest = Scalar(1) - y1 - y4;
    std::vector<Scalar> y{y1, rest * g, rest * (Scalar(1) - g), y4};
    std::vector<Scalar> lam = B * (B * y);
    Scalar tot;
    for (const Scalar& v : lam) tot += v;
    for (Scalar& v : lam) v /= tot;
    return {Iet(p0, lam), eps, y};
}

/// beta_l = T^{k_l}(midpoint of J_l) on well separated levels, increasing in l.
inline std::vector<Scalar> captured_betas(const RigidityTower& t, int r) {
    std::vector<std::int64_t> order(static_cast<std::size_t>(t.q));
    std::iota(order.begin(), order.end(), std::int64_t{0});
    std::sort(order.begin(), order.end(), [&](std::int64_t a, std::int64_t b) {
        return compare(t.shifts[static_cast<std::size_t>(a)], t.shifts[static_cast<std::size_t>(b)]) < 0;
    });
    const auto Jl = subtower_bases(t, r);
    std::vector<Scalar> betas;
    for (int l = 0; l < r; ++l) {
        const std::int64_t k = order[static_cast<std::size_t>((2 * l + 1) * t.q / (2 * r))];
        const Interval& J = Jl[static_cast<std::size_t>(l)];
        betas.push_back(t.shifts[static_cast<std::size_t>(k)] + (J.lo + J.hi) / Scalar(2));
    }
    return betas;
}

/// Piecewise-constant roof with value 1 on [0, beta_1) and the given jumps at the betas.
inline PiecewiseRoof step_roof(const std::vector<Scalar>& betas, const std::vector<Scalar>& jumps) {
    std::vector<RoofPiece> pieces{{Scalar(0), Scalar(1), Scalar(0)}};
    Scalar v(1);
    for (std::size_t i = 0; i < betas.size(); ++i) {
        v += jumps[i];
        pieces.push_back({betas[i], v, Scalar(0)});
    }
    return PiecewiseRoof(std::move(pieces));
}

}  // namespace fixtures

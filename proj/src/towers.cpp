#include "ietflow/towers.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

#include "ietflow/errors.hpp"

namespace ietflow {

namespace {

Scalar sum(const std::vector<Scalar>& v) {
    Scalar t;
    for (const Scalar& x : v) t += x;
    return t;
}

Scalar q_of(const mpq_class& q) { return Scalar(q); }

std::string relation_string(const std::string& rel) { return rel; }

bool holds(int c, const std::string& rel) {
    if (rel == "<") return c < 0;
    if (rel == "<=") return c <= 0;
    if (rel == "=") return c == 0;
    if (rel == ">") return c > 0;
    if (rel == ">=") return c >= 0;
    throw InvalidInput("unknown relation " + rel);
}

/// Orders the levels by left endpoint and checks consecutive gaps.
bool levels_disjoint(const std::vector<Scalar>& lefts, const Scalar& len) {
    std::vector<std::size_t> idx(lefts.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return compare(lefts[a], lefts[b]) < 0; });
    for (std::size_t i = 1; i < idx.size(); ++i) {
        if (compare(lefts[idx[i - 1]] + len, lefts[idx[i]]) > 0) return false;
    }
    return true;
}

/// Shifts tau_i = T^i(0) for 0 <= i <= q, checking every level of [0, len) stays inside one I_k.
std::vector<Scalar> level_shifts(const Iet& iet, const Scalar& len, std::int64_t q) {
    std::vector<Scalar> shifts;
    shifts.reserve(static_cast<std::size_t>(q) + 1);
    Scalar x;
    shifts.push_back(x);
    for (std::int64_t i = 0; i < q; ++i) {
        const int k = iet.index_of(x);
        if (compare(x + len, iet.interval(k).hi) > 0) {
            throw DomainError("tower level " + std::to_string(i) + " straddles a discontinuity");
        }
        x += iet.offset(k);
        shifts.push_back(x);
    }
    return shifts;
}

struct Setup {
    Permutation pi0;
    std::vector<Scalar> lambda0;
    std::int64_t m = 0;
    IntMatrix B;
    IntMatrix B_inv;
    mpq_class rho;
};

Setup positive_return(const Permutation& pi0, std::vector<Scalar> lambda0, std::int64_t max_steps) {
    auto [m, trace] = find_positive_return(pi0, lambda0, max_steps);
    Setup s;
    s.pi0 = pi0;
    s.lambda0 = std::move(lambda0);
    s.m = m;
    s.B = trace.cumulative_domain();
    s.B_inv = s.B.inverse();
    s.rho = balance_ratio(s.B);
    return s;
}

using RegionTest = std::function<bool(const std::vector<Scalar>&, const Scalar&)>;
using TowerMaker = std::function<RigidityTower(const RauzyState&, const IntMatrix&, std::int64_t r, std::int64_t N)>;

/*
 * Scans R^r(pi, lambda) for r = 1..budget. A hit needs pi^r = pi0 and
 * B^-1 lambda^r in R_+ Y; the tower is then built at depth N = r + m,
 * where pi^N = pi0 and lambda^N / |lambda^N| lies in Y again.
 */
TowerFamily scan(const Iet& iet, const Setup& s, const RegionTest& in_Y, const TowerMaker& make,
                 std::int64_t budget, const TowerOptions& opt) {
    TowerFamily fam;
    const int d = iet.size();
    RauzyState st = RauzyState::start(iet.pi(), iet.lambda());
    IntMatrix A = IntMatrix::identity(d);
    std::deque<std::pair<std::int64_t, std::int64_t>> pending;  // (r, N)
    std::int64_t hits = 0;
    const std::int64_t horizon = budget + s.m;
    std::int64_t step = 0;
    while (step < horizon) {
        if (pending.empty() && (step >= budget || fam.towers.size() >= opt.max_towers)) break;
        ++step;
        InductionStep is = [&] {
            try {
                return advance(st);
            } catch (const KeaneViolation& e) {
                throw KeaneViolation(e.what(), step);
            }
        }();
        for (int i = 0; i < d; ++i) A(i, is.loser) += A(i, is.winner);
        const Permutation pi = st.pi();
        if (step <= budget && static_cast<std::size_t>(hits) < opt.max_towers && pi == s.pi0) {
            const std::vector<Scalar> x = s.B_inv * st.lambda_domain();
            if (std::all_of(x.begin(), x.end(), [](const Scalar& v) { return v.sign() > 0; }) && in_Y(x, sum(x))) {
                pending.emplace_back(step, step + s.m);
                ++hits;
            }
        }
        while (!pending.empty() && pending.front().second == step) {
            const auto [r, N] = pending.front();
            pending.pop_front();
            const std::vector<Scalar> lam = st.lambda_domain();
            if (!(pi == s.pi0) || !in_Y(lam, sum(lam))) {
                throw DomainError("induction after a recurrence hit left {pi0} x Y at step " + std::to_string(N));
            }
            RigidityTower t = make(st, A, r, N);
            if (t.q > opt.max_height) {
                fam.stop_reason = "height limit " + std::to_string(opt.max_height) + " reached";
                fam.steps_used = step;
                return fam;
            }
            fam.towers.push_back(std::move(t));
        }
    }
    fam.steps_used = step;
    if (fam.towers.empty()) {
        throw BudgetExhausted("no recurrence hit into {pi0} x Y within " + std::to_string(budget) + " steps");
    }
    fam.stop_reason = fam.towers.size() >= opt.max_towers ? "tower count reached" : "budget exhausted";
    return fam;
}

/// Height and shifts only; the heavy part is deferred until the height check passes.
RigidityTower base_tower(const Iet& iet, TowerCase kind, const RauzyState& st, const IntMatrix& A, std::int64_t r,
                         std::int64_t N, std::int64_t max_height) {
    RigidityTower t;
    t.kind = kind;
    t.n_index = r;
    t.depth = N;
    t.lambda_depth = st.lambda_domain();
    const IntMatrix Ad = A.permute_columns(st.top);
    t.heights = Ad.column_sums();
    t.rho = balance_ratio(Ad);
    const std::size_t d = t.heights.size();
    mpz_class q = t.heights[0];
    if (kind == TowerCase::Constant) q += t.heights[d - 1];
    if (!q.fits_slong_p() || q.get_si() > max_height) {
        t.q = q.fits_slong_p() ? q.get_si() : max_height + 1;
        return t;
    }
    t.q = q.get_si();
    t.induced_length = sum(t.lambda_depth);
    const Scalar& len = t.lambda_depth[0];
    t.delta = {Scalar(0), len};
    t.shifts = level_shifts(iet, len, t.q);
    const Scalar& c = t.shifts.back();
    t.displacement = c;
    // J = D ∩ (D - c) ∩ (D - 2c) for D = [0, len).
    const Scalar lo = max(Scalar(0), max(-c, -(c + c)));
    const Scalar hi = min(len, min(len - c, len - c - c));
    t.J = {lo, compare(hi, lo) > 0 ? hi : lo};
    t.measure = Scalar(t.q) * t.J.length();

    std::vector<Scalar> lefts(t.shifts.begin(), t.shifts.end() - 1);
    t.certificates.push_back(
        {"tower levels over the base are pairwise disjoint", levels_disjoint(lefts, len) ? "0" : "1", "=", "0",
         levels_disjoint(lefts, len)});
    t.certificates.push_back(certify("T^q(base) lies in I^N", c + len, "<=", t.induced_length));
    Scalar hsum;
    for (std::size_t j = 0; j < d; ++j) hsum += Scalar(t.heights[j]) * t.lambda_depth[j];
    t.certificates.push_back(certify("sum_j s_j lambda_j^N = |lambda|", hsum, "=", iet.total()));
    t.certificates.push_back(certify("Leb(J) > 0", t.J.length(), ">", Scalar(0)));
    return t;
}

}  // namespace

Certificate certify(std::string name, const Scalar& lhs, const std::string& relation, const Scalar& rhs) {
    return {std::move(name), lhs.str(), relation_string(relation), rhs.str(), holds(compare(lhs, rhs), relation)};
}

std::vector<Interval> RokhlinTower::levels() const {
    std::vector<Interval> out;
    out.reserve(static_cast<std::size_t>(height));
    Interval lv = base;
    for (std::int64_t i = 0; i < height; ++i) {
        out.push_back(lv);
        if (i + 1 == height) break;
        const int k = iet->index_of(lv.lo);
        if (compare(lv.hi, iet->interval(k).hi) > 0) {
            throw DomainError("tower level " + std::to_string(i) + " straddles a discontinuity");
        }
        lv = lv.shifted(iet->offset(k));
    }
    return out;
}

std::vector<RokhlinTower> tower_decomposition(const Iet& iet, const InductionTrace& trace) {
    if (trace.pi0() != iet.pi() || trace.lambda0() != iet.lambda()) {
        throw InvalidInput("trace does not start at the given exchange");
    }
    auto shared = std::make_shared<const Iet>(iet);
    const std::vector<Scalar> lam = trace.lambda_n_domain();
    const std::vector<mpz_class> h = trace.heights_domain();
    std::vector<RokhlinTower> out;
    Scalar left;
    for (std::size_t j = 0; j < lam.size(); ++j) {
        if (!h[j].fits_slong_p()) throw DomainError("tower height does not fit in 64 bits");
        out.push_back({Interval{left, left + lam[j]}, h[j].get_si(), shared});
        left += lam[j];
    }
    return out;
}

std::vector<Interval> RigidityTower::levels() const {
    std::vector<Interval> out;
    out.reserve(static_cast<std::size_t>(q));
    for (std::int64_t i = 0; i < q; ++i) out.push_back(level(i));
    return out;
}

bool RigidityTower::certified() const {
    return std::all_of(certificates.begin(), certificates.end(), [](const Certificate& c) { return c.holds; });
}

mpq_class choose_delta_linear(const mpq_class& eps, const mpq_class& rho) {
    const mpz_class grid = mpz_class(1) << 32;
    auto ok = [&](const mpz_class& k) {
        const mpq_class d(k, grid);
        if (!(6 * d < eps)) return false;
        const mpq_class g = (1 - 3 * d) * (1 - rho * d / (1 - d));
        return g > 1 - eps;
    };
    if (!ok(1)) {
        throw ParameterInfeasible("no delta satisfies 6 delta < eps and (1-3 delta)(1-rho delta/(1-delta)) > 1-eps");
    }
    // Both conditions are monotone in delta on (0, 1/6).
    mpz_class lo = 1, hi = grid / 6 + 1;
    while (hi - lo > 1) {
        const mpz_class mid = (lo + hi) / 2;
        (ok(mid) ? lo : hi) = mid;
    }
    mpq_class out(lo, grid);
    out.canonicalize();
    return out;
}

mpq_class constant_epsilon_bound(const mpq_class& rho, int r) {
    return std::min<mpq_class>(mpq_class(1) / (10 * rho), mpq_class(1, 8 * (2 * r + 1)));
}

std::pair<mpq_class, mpq_class> choose_deltas_constant(const mpq_class& eps, const mpq_class& rho, int r) {
    const mpq_class bound = constant_epsilon_bound(rho, r);
    if (!(sgn(eps) > 0 && eps < bound)) {
        throw ParameterInfeasible("epsilon must lie in (0, min(1/(10 rho(B)), 1/(8(2r+1)))) = (0, " + bound.get_str() +
                                  ")");
    }
    const mpz_class grid = mpz_class(1) << 32;
    const mpq_class half = eps / 2;
    const mpz_class k = (half.get_num() * grid + half.get_den() - 1) / half.get_den();
    mpq_class delta(k - 1, grid);
    delta.canonicalize();
    mpq_class dprime = delta - eps / (8 * rho);
    if (dprime <= eps / 3 || dprime >= eps / 2) dprime = (eps / 3 + delta) / 2;
    if (!(eps / 3 < dprime && dprime < delta && delta < eps / 2 && delta - dprime < eps / (4 * rho))) {
        throw ParameterInfeasible("no admissible delta, delta' for epsilon " + eps.get_str());
    }
    return {delta, dprime};
}

TowerFamily build_W_linear(const Iet& iet, const mpq_class& epsilon, std::int64_t budget, const TowerOptions& opt) {
    if (sgn(epsilon) <= 0 || epsilon >= 1) throw InvalidInput("epsilon must lie in (0, 1)");
    if (budget < 0) throw InvalidInput("budget must be >= 0");
    const Permutation pi0 = opt.pi0.value_or(iet.pi());
    if (pi0 != iet.pi() && !opt.lambda0) {
        throw InvalidInput("a custom pi0 needs an explicit lambda0");
    }
    const Setup s = positive_return(pi0, opt.lambda0.value_or(iet.lambda()), opt.positive_return_steps);
    const mpq_class delta = choose_delta_linear(epsilon, s.rho);
    const int d = iet.size();
    const Scalar dl = q_of(delta);
    const Scalar lower_j = dl / Scalar(2 * d);

    RegionTest in_Y = [&](const std::vector<Scalar>& x, const Scalar& tot) {
        if (compare(x[0], (Scalar(1) - dl) * tot) <= 0) return false;
        for (int j = 1; j < d; ++j)
            if (compare(x[static_cast<std::size_t>(j)], lower_j * tot) <= 0) return false;
        return true;
    };
    const Scalar total = iet.total();
    const Scalar eps = q_of(epsilon);
    const Scalar rhoB = q_of(s.rho);
    TowerMaker make = [&](const RauzyState& st, const IntMatrix& A, std::int64_t r, std::int64_t N) {
        RigidityTower t = base_tower(iet, TowerCase::Linear, st, A, r, N, opt.max_height);
        if (t.shifts.empty()) return t;
        Scalar expected;
        for (int i = 0; i < d; ++i)
            if (pi0(i) < pi0(0)) expected += t.lambda_depth[static_cast<std::size_t>(i)];
        t.gamma = Scalar(t.q) * t.displacement;
        const Scalar& I = t.induced_length;
        t.certificates.push_back(certify("displacement = sum_{pi0(i)<pi0(1)} lambda_i^N", t.displacement, "=", expected));
        t.certificates.push_back(certify("lambda_1^N > (1-delta)|I^N|", t.lambda_depth[0], ">", (Scalar(1) - dl) * I));
        Scalar mn = t.lambda_depth[1];
        for (int j = 2; j < d; ++j) mn = min(mn, t.lambda_depth[static_cast<std::size_t>(j)]);
        t.certificates.push_back(certify("min_{j>=2} lambda_j^N > delta/(2d)|I^N|", mn, ">", lower_j * I));
        t.certificates.push_back(certify("rho(A^N) <= rho(B)", q_of(t.rho), "<=", rhoB));
        t.certificates.push_back(certify("Leb(J) >= (1-3delta)|I^N|", t.J.length(), ">=", (Scalar(1) - Scalar(3) * dl) * I));
        t.certificates.push_back(certify("Leb(W) > (1-eps)|lambda|", t.measure, ">", (Scalar(1) - eps) * total));
        t.certificates.push_back(certify("gamma >= (delta/2d)(1-rho(B)delta/(1-delta))|lambda|", t.gamma, ">=",
                                         lower_j * (Scalar(1) - rhoB * dl / (Scalar(1) - dl)) * total));
        t.certificates.push_back(certify("displacement <= |I^N|", t.displacement.abs(), "<=", I));
        return t;
    };
    TowerFamily fam = scan(iet, s, in_Y, make, budget, opt);
    fam.params = {s.pi0, s.lambda0, s.m, s.B, s.rho, epsilon, delta, 0, {}};
    fam.params.certificates.push_back(certify("6 delta < eps", Scalar(6) * dl, "<", eps));
    fam.params.certificates.push_back(certify("(1-3delta)(1-rho(B)delta/(1-delta)) > 1-eps",
                                              (Scalar(1) - Scalar(3) * dl) * (Scalar(1) - rhoB * dl / (Scalar(1) - dl)),
                                              ">", Scalar(1) - eps));
    return fam;
}

namespace {

bool standard_form(const Permutation& p) {
    const int d = p.size();
    return p(0) == d - 1 && p(d - 1) == 0;
}

}  // namespace

TowerFamily build_W_constant(const Iet& iet, const mpq_class& epsilon, int r, std::int64_t budget,
                             const TowerOptions& opt) {
    if (r < 1) throw InvalidInput("r must be a positive integer");
    if (sgn(epsilon) <= 0 || epsilon >= 1) throw InvalidInput("epsilon must lie in (0, 1)");
    if (budget < 0) throw InvalidInput("budget must be >= 0");

    Permutation pi0;
    if (opt.pi0) {
        pi0 = *opt.pi0;
        if (!standard_form(pi0)) throw InvalidInput("pi0 must satisfy pi0(1) = d and pi0(d) = 1");
    } else if (standard_form(iet.pi())) {
        pi0 = iet.pi();
    } else {
        const auto cls = rauzy_class(iet.pi());
        auto it = std::find_if(cls.begin(), cls.end(), standard_form);
        if (it == cls.end()) throw NoSuitablePermutation("Rauzy class has no pi0 with pi0(1) = d, pi0(d) = 1");
        pi0 = *it;
    }
    std::vector<Scalar> lambda0;
    if (opt.lambda0) {
        lambda0 = *opt.lambda0;
    } else if (pi0 == iet.pi()) {
        lambda0 = iet.lambda();
    } else {
        InductionTrace tr(iet.pi(), iet.lambda());
        while (tr.pi_n() != pi0) {
            if (tr.n() >= opt.positive_return_steps) {
                throw NotFound("induction does not reach pi0 " + pi0.str(), opt.positive_return_steps);
            }
            tr.extend(1);
        }
        lambda0 = tr.lambda_n_domain();
    }
    const Setup s = positive_return(pi0, std::move(lambda0), opt.positive_return_steps);

    const mpq_class bound = constant_epsilon_bound(s.rho, r);
    const auto [delta, dprime] = choose_deltas_constant(epsilon, s.rho, r);
    const Scalar dl = q_of(delta), dp = q_of(dprime), eps = q_of(epsilon), rhoB = q_of(s.rho);
    const Scalar width = (dl - dp) / Scalar(4);
    const Scalar half1 = Scalar(1, 2);
    RegionTest in_Y = [&](const std::vector<Scalar>& x, const Scalar& tot) {
        const Scalar& a = x.front();
        const Scalar& b = x.back();
        return compare(a, (half1 - dl) * tot) > 0 && compare(a, (half1 - dl + width) * tot) < 0 &&
               compare(b, (half1 + dp) * tot) > 0 && compare(b, (half1 + dp + width) * tot) < 0;
    };
    const Scalar total = iet.total();
    TowerMaker make = [&](const RauzyState& st, const IntMatrix& A, std::int64_t rr, std::int64_t N) {
        RigidityTower t = base_tower(iet, TowerCase::Constant, st, A, rr, N, opt.max_height);
        if (t.shifts.empty()) return t;
        const Scalar& I = t.induced_length;
        t.lambda_gap = t.lambda_depth.back() - t.lambda_depth.front();
        const Scalar s1 = Scalar(t.heights.front());
        const Scalar& tau1 = t.shifts[static_cast<std::size_t>(t.heights.front().get_si())];
        t.certificates.push_back(certify("displacement = lambda_d^N - lambda_1^N", t.displacement, "=", t.lambda_gap));
        t.certificates.push_back(certify("T^{s_1}I_1^N starts inside I_d^N", tau1, ">=", I - t.lambda_depth.back()));
        t.certificates.push_back(certify("T^{s_1}I_1^N ends inside I^N", tau1 + t.lambda_depth.front(), "<=", I));
        t.certificates.push_back(certify("lambda_d^N - lambda_1^N > (eps/2)|I^N|", t.lambda_gap, ">", eps / Scalar(2) * I));
        t.certificates.push_back(certify("lambda_d^N - lambda_1^N < 2 delta |I^N|", t.lambda_gap, "<", Scalar(2) * dl * I));
        t.certificates.push_back(certify("Leb(J) > |I^N|/4", t.J.length(), ">", I / Scalar(4)));
        t.certificates.push_back(certify("rho(A^N) <= rho(B)", q_of(t.rho), "<=", rhoB));
        t.certificates.push_back(certify("Leb(W) > |lambda|/(4 rho(B))", t.measure, ">", total / (Scalar(4) * rhoB)));
        t.certificates.push_back(certify("s_1|I^N| >= |lambda|/rho(B)", s1 * I, ">=", total / rhoB));
        t.certificates.push_back(certify("lambda_d^N - lambda_1^N < |J|/(2(2r+1))", t.lambda_gap, "<",
                                         t.J.length() / Scalar(2 * (2 * r + 1))));
        t.certificates.push_back(certify("Leb(W^l) = Leb(W)/(2r+1)",
                                         Scalar(t.q) * t.J.length() / Scalar(2 * r + 1), "=",
                                         t.measure / Scalar(2 * r + 1)));
        return t;
    };
    TowerFamily fam = scan(iet, s, in_Y, make, budget, opt);
    fam.params = {s.pi0, s.lambda0, s.m, s.B, s.rho, epsilon, delta, dprime, {}};
    fam.params.certificates.push_back(certify("eps < min(1/(10 rho(B)), 1/(8(2r+1)))", eps, "<", q_of(bound)));
    fam.params.certificates.push_back(certify("eps/3 < delta'", eps / Scalar(3), "<", dp));
    fam.params.certificates.push_back(certify("delta' < delta", dp, "<", dl));
    fam.params.certificates.push_back(certify("delta < eps/2", dl, "<", eps / Scalar(2)));
    fam.params.certificates.push_back(certify("delta - delta' < eps/(4 rho(B))", dl - dp, "<", eps / (Scalar(4) * rhoB)));
    return fam;
}

std::vector<Interval> subtower_bases(const RigidityTower& t, int r) {
    if (r < 1) throw InvalidInput("r must be a positive integer");
    std::vector<Interval> out;
    const Scalar len = t.J.length();
    const Scalar den(2 * r + 1);
    for (int l = 1; l <= r; ++l) {
        out.push_back({t.J.lo + Scalar(2 * l - 1) * len / den, t.J.lo + Scalar(2 * l) * len / den});
    }
    return out;
}

std::optional<std::int64_t> capture_index(const RigidityTower& t, const Interval& Jl, const Scalar& beta) {
    // T^-k beta in J_l iff beta - tau_k in J_l, since T^k acts on J as the shift tau_k.
    for (std::int64_t k = 0; k < t.q; ++k) {
        if (Jl.contains(beta - t.shifts[static_cast<std::size_t>(k)])) return k;
    }
    return std::nullopt;
}

Windows discontinuity_windows(const Iet& iet, const RigidityTower& t, const std::vector<Scalar>& betas) {
    const int r = static_cast<int>(betas.size());
    if (r < 1) throw InvalidInput("at least one discontinuity is required");
    for (int i = 0; i < r; ++i)
        for (int j = i + 1; j < r; ++j)
            if (betas[static_cast<std::size_t>(i)] == betas[static_cast<std::size_t>(j)]) {
                throw InvalidInput("discontinuities must be pairwise distinct");
            }
    const auto Jl = subtower_bases(t, r);
    const Scalar& c = t.displacement;
    Windows out;
    std::vector<Interval> all;
    for (int l = 0; l < r; ++l) {
        const Scalar& beta = betas[static_cast<std::size_t>(l)];
        const auto k = capture_index(t, Jl[static_cast<std::size_t>(l)], beta);
        if (!k) throw NotCaptured("beta_" + std::to_string(l + 1) + " = " + beta.str() + " is not in W^l", l + 1);
        WindowTower w{beta, *k, {}};
        const Scalar y = beta - t.shifts[static_cast<std::size_t>(*k)];
        w.levels.reserve(static_cast<std::size_t>(t.q));
        for (std::int64_t i = 0; i < t.q; ++i) {
            if (i <= *k) {
                w.levels.push_back(Interval{y - c, y}.shifted(t.shifts[static_cast<std::size_t>(*k - i)]));
            } else {
                w.levels.push_back(
                    Interval{y - c - c, y - c}.shifted(t.shifts[static_cast<std::size_t>(t.q - i + *k)]));
            }
        }
        // Each level must be the exact preimage of the previous one.
        bool chain = w.levels.front() == Interval{beta - c, beta};
        for (std::size_t i = 1; chain && i < w.levels.size(); ++i) {
            const Interval& prev = w.levels[i - 1];
            const Interval& cur = w.levels[i];
            const int kk = iet.index_of(cur.lo);
            chain = compare(cur.hi, iet.interval(kk).hi) <= 0 && cur.shifted(iet.offset(kk)) == prev;
        }
        out.certificates.push_back({"V_" + std::to_string(l + 1) + " levels are successive preimages",
                                    chain ? "1" : "0", "=", "1", chain});
        all.insert(all.end(), w.levels.begin(), w.levels.end());
        out.windows.push_back(std::move(w));
    }
    out.total_mass = Scalar(r) * c * Scalar(t.q);
    const bool disjoint = pairwise_disjoint(all);
    out.certificates.push_back({"window levels pairwise disjoint", disjoint ? "1" : "0", "=", "1", disjoint});
    const IntervalSet V(all);
    out.certificates.push_back(certify("Leb(union V_l) = r (lambda_d - lambda_1) q", V.measure(), "=", out.total_mass));
    out.certificates.push_back(certify("Leb(union V_l minus W)", subtract(V, t.W()).measure(), "=", Scalar(0)));
    return out;
}

RigidityDiagnostic rigidity_diagnostic(const Iet& iet, const RigidityTower& t, std::int64_t sample_levels) {
    RigidityDiagnostic out;
    if (t.q == 0 || t.J.empty()) return out;
    const std::int64_t n = std::min<std::int64_t>(std::max<std::int64_t>(sample_levels, 1), t.q);
    bool first = true;
    for (std::int64_t s = 0; s < n; ++s) {
        const std::int64_t i = n == 1 ? 0 : s * (t.q - 1) / (n - 1);
        const Interval lv = t.level(i);
        for (const Scalar& x : {lv.lo, (lv.lo + lv.hi) / Scalar(2)}) {
            const Scalar xq = iet.apply(x, t.q);
            const Scalar x2q = iet.apply(xq, t.q);
            const Scalar d1 = (xq - x).abs();
            const Scalar d2 = (x2q - x).abs();
            if (first || compare(d1, out.sup_disp_q) > 0) out.sup_disp_q = d1;
            if (first || compare(d2, out.sup_disp_2q) > 0) out.sup_disp_2q = d2;
            first = false;
        }
        ++out.levels_checked;
    }
    const IntervalSet W = t.W();
    out.boundary_measure = symmetric_difference(W, image(iet, W, -1)).measure();
    return out;
}

Scalar center_on_tower(const PiecewiseAffine& f, const Interval& base, const std::vector<Interval>& levels) {
    Scalar total;
    for (const Interval& lv : levels) total += f.integral(lv.lo, lv.hi);
    return total / base.length();
}

Scalar center_on_tower(const PiecewiseAffine& f, const RokhlinTower& t) {
    return center_on_tower(f, t.base, t.levels());
}

Scalar center_on_tower(const PiecewiseAffine& f, const RigidityTower& t) {
    std::vector<Interval> lv;
    lv.reserve(static_cast<std::size_t>(t.q));
    for (std::int64_t i = 0; i < t.q; ++i) lv.push_back(t.delta.shifted(t.shifts[static_cast<std::size_t>(i)]));
    return center_on_tower(f, t.delta, lv);
}

}  // namespace ietflow

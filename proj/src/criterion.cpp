#include "ietflow/criterion.hpp"

#include <algorithm>

#include "ietflow/errors.hpp"

namespace ietflow {

namespace {

/*
 * Closed form of the Birkhoff sums on a rigidity tower. For x = T^k y with
 * y in J, the orbit of length q visits level e of the base tower at
 * tau_e + y for e >= k and at tau_e + y + c for e < k. A level is an event
 * when a breakpoint of f lies strictly inside it; elsewhere f is affine
 * there with slope sigma_e and left value A_e.
 */
struct Sweep {
    const PiecewiseAffine& f;
    const RigidityTower& t;
    Scalar c;
    std::vector<std::int64_t> events;
    Scalar sum_sigma;  // over non-event levels
    Scalar sum_A;      // over non-event levels
    std::vector<Scalar> cuts;

    Sweep(const PiecewiseAffine& f_, const RigidityTower& t_) : f(f_), t(t_), c(t_.displacement) {
        if (t.q == 0 || t.J.empty()) throw InvalidInput("tower has an empty base");
        const Scalar& len = t.delta.hi;
        for (std::int64_t e = 0; e < t.q; ++e) {
            const Scalar& tau = t.shifts[static_cast<std::size_t>(e)];
            const std::size_t p = f.piece_index(tau);
            if (compare(f.piece_end(p), tau + len) < 0) {
                events.push_back(e);
            } else {
                sum_sigma += f.pieces()[p].slope;
                sum_A += f.evaluate(tau);
            }
        }
        cuts = {t.J.lo, t.J.hi};
        for (std::int64_t e : events) {
            const Scalar& tau = t.shifts[static_cast<std::size_t>(e)];
            for (const Scalar& b : f.breakpoints()) {
                for (const Scalar& z : {b - tau, b - tau - c, b - tau - c - c}) {
                    if (compare(t.J.lo, z) < 0 && compare(z, t.J.hi) < 0) cuts.push_back(z);
                }
            }
        }
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    }

    std::size_t classes() const { return events.size() + 1; }

    /// Levels k in class j have exactly j events below k.
    std::pair<std::int64_t, std::int64_t> class_range(std::size_t j) const {
        const std::int64_t lo = j == 0 ? 0 : events[j - 1] + 1;
        const std::int64_t hi = j == events.size() ? t.q - 1 : events[j];
        return {lo, hi};
    }

    std::size_t class_of(std::int64_t k) const {
        return static_cast<std::size_t>(std::lower_bound(events.begin(), events.end(), k) - events.begin());
    }

    /// Event part of f^(q)(T^k z) for k in class j, z in [0, |D| - c).
    Scalar event_sum(std::size_t j, const Scalar& z) const {
        Scalar s;
        for (std::size_t i = 0; i < events.size(); ++i) {
            const Scalar& tau = t.shifts[static_cast<std::size_t>(events[i])];
            s += f.evaluate(i < j ? tau + z + c : tau + z);
        }
        return s;
    }

    /// f^(q)(T^k y) up to the prefix term c * sum_{e<k, non-event} sigma_e.
    Scalar partial_F1(std::size_t j, const Scalar& y) const { return sum_A + sum_sigma * y + event_sum(j, y); }

    Scalar displacement(std::size_t j, const Scalar& y) const {
        return c * sum_sigma + event_sum(j, y + c) - event_sum(j, y);
    }

    void check_budget(std::size_t budget) const {
        const std::size_t cells = classes() * (cuts.size() - 1);
        if (cells > budget) {
            throw RefinementExplosion("subdivision needs " + std::to_string(cells) + " cells", budget);
        }
    }
};

Scalar midpoint(const Scalar& a, const Scalar& b) { return (a + b) / Scalar(2); }

}  // namespace

EmpiricalMeasure EmpiricalMeasure::from_atoms(std::vector<Atom> atoms, const mpq_class& tol) {
    std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return compare(a.value, b.value) < 0; });
    EmpiricalMeasure m;
    m.cluster_tol = tol;
    const Scalar t(tol);
    for (Atom& a : atoms) {
        if (!m.atoms.empty() && compare(a.value - m.atoms.back().value, t) <= 0) {
            m.atoms.back().mass += a.mass;
        } else {
            m.atoms.push_back(std::move(a));
        }
    }
    for (const Atom& a : m.atoms) m.total += a.mass;
    return m;
}

Scalar EmpiricalMeasure::continuous_mass() const {
    Scalar s;
    for (const Segment& g : continuous) s += g.mass;
    return s;
}

Scalar EmpiricalMeasure::mass_at(const Scalar& v) const {
    const Scalar t(cluster_tol);
    for (const Atom& a : atoms)
        if (compare((a.value - v).abs(), t) <= 0) return a.mass;
    return Scalar(0);
}

EmpiricalMeasure PairMeasure::push_xi() const {
    std::vector<Atom> at;
    for (const PairAtom& p : atoms) at.push_back({p.x - Scalar(2) * p.y, p.mass});
    std::vector<Segment> seg;
    for (const PairSegment& s : segments) {
        const Scalar v0 = s.x0 - Scalar(2) * s.y0;
        const Scalar v1 = s.x1 - Scalar(2) * s.y1;
        if (v0 == v1) {
            at.push_back({v0, s.mass});
        } else {
            seg.push_back({v0, v1, s.mass});
        }
    }
    EmpiricalMeasure m = EmpiricalMeasure::from_atoms(std::move(at));
    m.continuous = std::move(seg);
    m.total += m.continuous_mass();
    return m;
}

EmpiricalMeasure displacement_distribution(const PiecewiseAffine& f, const Iet& iet, const RigidityTower& t,
                                           std::size_t cell_budget) {
    (void)iet;
    const Sweep sw(f, t);
    sw.check_budget(cell_budget);
    std::vector<Atom> atoms;
    std::vector<Segment> segs;
    for (std::size_t j = 0; j < sw.classes(); ++j) {
        const auto [klo, khi] = sw.class_range(j);
        if (khi < klo) continue;
        const Scalar count(khi - klo + 1);
        for (std::size_t i = 0; i + 1 < sw.cuts.size(); ++i) {
            const Scalar& u = sw.cuts[i];
            const Scalar& v = sw.cuts[i + 1];
            const Scalar mass = count * (v - u) / t.measure;
            const Scalar d0 = sw.displacement(j, u);
            const Scalar dm = sw.displacement(j, midpoint(u, v));
            if (d0 == dm) {
                atoms.push_back({d0, mass});
            } else {
                segs.push_back({d0, dm + dm - d0, mass});
            }
        }
    }
    EmpiricalMeasure m = EmpiricalMeasure::from_atoms(std::move(atoms));
    m.continuous = std::move(segs);
    m.total += m.continuous_mass();
    return m;
}

Scalar displacement_at(const PiecewiseAffine& f, const RigidityTower& t, std::int64_t k, const Scalar& y) {
    if (k < 0 || k >= t.q || !t.J.contains(y)) throw DomainError("point is not on the tower");
    const Sweep sw(f, t);
    return sw.displacement(sw.class_of(k), y);
}

PairMeasure pair_distribution(const PiecewiseAffine& f, const Iet& iet, const RigidityTower& t, const Scalar& a,
                              std::size_t cell_budget) {
    (void)iet;
    const Sweep sw(f, t);
    const std::size_t pieces = sw.classes() * (sw.cuts.size() - 1);
    if (pieces * static_cast<std::size_t>(t.q) / sw.classes() > cell_budget) {
        throw RefinementExplosion("pair distribution needs more than " + std::to_string(cell_budget) + " cells",
                                  cell_budget);
    }
    // Prefix term P(k) = c * sum_{e<k, non-event} sigma_e.
    std::vector<Scalar> prefix(static_cast<std::size_t>(t.q));
    {
        Scalar run;
        std::size_t ev = 0;
        for (std::int64_t k = 0; k < t.q; ++k) {
            prefix[static_cast<std::size_t>(k)] = t.displacement * run;
            if (ev < sw.events.size() && sw.events[ev] == k) {
                ++ev;
            } else {
                const Scalar& tau = t.shifts[static_cast<std::size_t>(k)];
                run += f.pieces()[f.piece_index(tau)].slope;
            }
        }
    }
    PairMeasure pm;
    const Scalar two(2);
    for (std::size_t j = 0; j < sw.classes(); ++j) {
        const auto [klo, khi] = sw.class_range(j);
        if (khi < klo) continue;
        Scalar sum_p, sum_p2;
        for (std::int64_t k = klo; k <= khi; ++k) {
            const Scalar& p = prefix[static_cast<std::size_t>(k)];
            sum_p += p;
            sum_p2 += p * p;
        }
        const Scalar count(khi - klo + 1);
        for (std::size_t i = 0; i + 1 < sw.cuts.size(); ++i) {
            const Scalar& u = sw.cuts[i];
            const Scalar& v = sw.cuts[i + 1];
            const Scalar len = v - u;
            const Scalar mid = midpoint(u, v);
            // Without the prefix term: F1 = b1 + s1 (y - u), F2 = b2 + s2 (y - u).
            const Scalar b1 = sw.partial_F1(j, u) - a;
            const Scalar b2 = sw.partial_F1(j, u) + sw.partial_F1(j, u + sw.c) - two * a;
            const Scalar s1 = (sw.partial_F1(j, mid) - a - b1) * two / len;
            const Scalar s2 = (sw.partial_F1(j, mid) + sw.partial_F1(j, mid + sw.c) - two * a - b2) * two / len;
            const Scalar mass = len / t.measure;
            for (std::int64_t k = klo; k <= khi; ++k) {
                const Scalar& p = prefix[static_cast<std::size_t>(k)];
                const Scalar y0 = b1 + p;
                const Scalar x0 = b2 + two * p;
                if (s1.is_zero() && s2.is_zero()) {
                    pm.atoms.push_back({x0, y0, mass});
                } else {
                    pm.segments.push_back({x0, y0, x0 + s2 * len, y0 + s1 * len, mass});
                }
            }
            // Sum over k of the integral of (alpha_k + s t)^2 over [0, len) with alpha_k = b + m p_k.
            auto moment = [&](const Scalar& b, const Scalar& s, const Scalar& m) {
                const Scalar sum_alpha = count * b + m * sum_p;
                const Scalar sum_alpha2 = count * b * b + two * b * m * sum_p + m * m * sum_p2;
                return sum_alpha2 * len + sum_alpha * s * len * len + count * s * s * len * len * len / Scalar(3);
            };
            pm.moment_q += moment(b1, s1, Scalar(1));
            pm.moment_2q += moment(b2, s2, two);
        }
    }
    std::sort(pm.atoms.begin(), pm.atoms.end(), [](const PairAtom& u, const PairAtom& v) {
        const int c = compare(u.x, v.x);
        return c != 0 ? c < 0 : compare(u.y, v.y) < 0;
    });
    std::vector<PairAtom> merged;
    for (auto& p : pm.atoms) {
        if (!merged.empty() && merged.back().x == p.x && merged.back().y == p.y) {
            merged.back().mass += p.mass;
        } else {
            merged.push_back(std::move(p));
        }
    }
    pm.atoms = std::move(merged);
    for (const auto& p : pm.atoms) pm.total += p.mass;
    for (const auto& s : pm.segments) pm.total += s.mass;
    return pm;
}

AcRigidity ac_rigidity_check(const PiecewiseAffine& g, const Iet& iet, const RigidityTower& t,
                             std::int64_t samples) {
    if (!g.continuous()) throw InvalidInput("g must be continuous");
    if (!g.sum_of_jumps().is_zero()) throw InvalidInput("g must satisfy integral of Dg = 0");
    const Sweep sw(g, t);
    AcRigidity out;
    for (std::size_t j = 0; j < sw.classes(); ++j) {
        const auto [klo, khi] = sw.class_range(j);
        if (khi < klo) continue;
        for (std::size_t i = 0; i + 1 < sw.cuts.size(); ++i) {
            const Scalar& u = sw.cuts[i];
            const Scalar& v = sw.cuts[i + 1];
            const Scalar d0 = sw.displacement(j, u);
            const Scalar d1 = sw.displacement(j, midpoint(u, v)) * Scalar(2) - d0;
            out.sup = max(out.sup, max(d0.abs(), d1.abs()));
        }
    }
    const std::int64_t n = std::max<std::int64_t>(samples, 0);
    for (std::int64_t s = 0; s < n; ++s) {
        const std::int64_t k = n == 1 ? 0 : s * (t.q - 1) / (n - 1);
        const Scalar y = t.J.lo + t.J.length() * Scalar(2 * s + 1, 2 * n);
        const Scalar x = t.shifts[static_cast<std::size_t>(k)] + y;
        const Scalar brute = birkhoff_sum(g, iet, t.q, iet.apply(x, t.q)) - birkhoff_sum(g, iet, t.q, x);
        out.sampled_sup = max(out.sampled_sup, brute.abs());
        out.samples_agree = out.samples_agree && brute == sw.displacement(sw.class_of(k), y);
        ++out.samples;
    }
    return out;
}

WlReport wl_report(const std::vector<RigidityTower>& towers, const PiecewiseAffine& f, const Iet& iet) {
    if (towers.size() < 2) throw InvalidInput("the diagnostic report needs at least two towers");
    WlReport rep;
    const Scalar var = f.variation();
    for (const RigidityTower& t : towers) {
        TowerDiagnostics d;
        d.depth = t.depth;
        d.q = t.q;
        d.measure = t.measure;
        d.J_length = t.J.length();
        d.induced_length = t.induced_length;
        const RigidityDiagnostic rd = rigidity_diagnostic(iet, t, 4);
        d.boundary_measure = rd.boundary_measure;
        d.sup_disp_q = rd.sup_disp_q;
        d.sup_disp_2q = rd.sup_disp_2q;
        d.a = center_on_tower(f, t);
        const PairMeasure pm = pair_distribution(f, iet, t, d.a);
        d.moment_q = pm.moment_q;
        d.moment_2q = pm.moment_2q;
        d.moment_q_bound = var * var * t.measure;
        d.moment_2q_bound = Scalar(4) * var * var * t.measure;
        rep.towers.push_back(std::move(d));
    }
    rep.boundary_decreasing = rep.displacement_decreasing = true;
    rep.boundary_within_2J = rep.displacement_within_I = rep.moments_bounded = true;
    for (std::size_t i = 0; i < rep.towers.size(); ++i) {
        const TowerDiagnostics& d = rep.towers[i];
        rep.boundary_within_2J = rep.boundary_within_2J && compare(d.boundary_measure, Scalar(2) * d.J_length) <= 0;
        rep.displacement_within_I = rep.displacement_within_I && compare(d.sup_disp_2q, d.induced_length) <= 0;
        rep.moments_bounded = rep.moments_bounded && compare(d.moment_q, d.moment_q_bound) <= 0 &&
                              compare(d.moment_2q, d.moment_2q_bound) <= 0;
        if (i == 0) continue;
        const TowerDiagnostics& p = rep.towers[i - 1];
        rep.boundary_decreasing = rep.boundary_decreasing && compare(d.boundary_measure, p.boundary_measure) < 0;
        rep.displacement_decreasing = rep.displacement_decreasing && compare(d.sup_disp_q, p.sup_disp_q) < 0;
    }
    return rep;
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Satisfied: return "SATISFIED";
        case Verdict::FailedMass: return "FAILED_MASS";
        case Verdict::FailedSymmetry: return "FAILED_SYMMETRY";
        case Verdict::Inconclusive: return "INCONCLUSIVE";
    }
    return "INCONCLUSIVE";
}

CriterionReport check_glwynik(const EmpiricalMeasure& xi_P, const Scalar& alpha, const mpq_class& atomic_tol) {
    if (alpha.sign() <= 0 || compare(alpha, Scalar(1)) > 0) throw InvalidInput("alpha must lie in (0, 1]");
    if (compare(xi_P.continuous_mass(), Scalar(atomic_tol)) > 0) {
        throw NotAtomic("measure has non-atomic mass " + xi_P.continuous_mass().str());
    }
    CriterionReport rep;
    rep.alpha = alpha;
    rep.atoms = xi_P.atoms;
    rep.threshold = (Scalar(1) - alpha) / alpha;
    const Scalar tol(xi_P.cluster_tol);
    auto is_zero = [&](const Scalar& v) { return compare(v.abs(), tol) <= 0; };
    for (const Atom& a : rep.atoms) (is_zero(a.value) ? rep.c0 : rep.nonzero_mass) += a.mass;
    for (std::size_t i = 0; i < rep.atoms.size(); ++i) {
        if (is_zero(rep.atoms[i].value)) continue;
        for (std::size_t j = i + 1; j < rep.atoms.size(); ++j) {
            if (is_zero(rep.atoms[j].value)) continue;
            if (is_zero(rep.atoms[i].value + rep.atoms[j].value)) {
                rep.symmetry_violations.emplace_back(static_cast<int>(i) + 1, static_cast<int>(j) + 1);
            }
        }
    }
    if (rep.atoms.empty() || xi_P.total.is_zero()) {
        rep.verdict = Verdict::Inconclusive;
    } else if (!rep.symmetry_violations.empty()) {
        rep.verdict = Verdict::FailedSymmetry;
    } else if (compare(rep.nonzero_mass, rep.threshold) > 0) {
        rep.verdict = Verdict::Satisfied;
    } else {
        rep.verdict = Verdict::FailedMass;
    }
    return rep;
}

PipelineReport theorem_pipeline(const Iet& iet, const PiecewiseRoof& f, const mpq_class& epsilon,
                                std::int64_t budget, const PipelineOptions& opt) {
    if (iet.total() != Scalar(1)) throw InvalidInput("lengths must sum to 1");
    PipelineReport rep;
    rep.S = f.sum_of_jumps();
    const Decomposition dec = decompose(f);
    rep.jumps = f.jumps();
    rep.caveats = {"Keane's condition is checked to depth " + std::to_string(opt.keane_depth) + " only",
                   "the verdict certifies the criterion inequality at the computed depth, not the limit"};
    if (auto v = keane_check(iet, opt.keane_depth)) {
        throw KeaneViolation("T^" + std::to_string(v->k) + " maps the endpoint of I_" + std::to_string(v->i) +
                                 " to the endpoint of I_" + std::to_string(v->j),
                             v->k);
    }

    if (!rep.S.is_zero()) {
        rep.case_number = 1;
        if (!continuity_over_exchanged(f, iet)) {
            throw InvalidInput("case S(f) != 0 needs f continuous inside every exchanged interval");
        }
        TowerFamily fam;
        try {
            fam = build_W_linear(iet, epsilon, budget, opt.towers);
        } catch (const BudgetExhausted& e) {
            rep.note = e.what();
            return rep;
        }
        rep.params = fam.params;
        for (RigidityTower& t : fam.towers) {
            DepthReport d;
            d.a = center_on_tower(f, t);
            d.displacement = displacement_distribution(dec.pl, iet, t, opt.cell_budget);
            d.displacement_f = displacement_distribution(f, iet, t, opt.cell_budget);
            d.ac = ac_rigidity_check(dec.ac, iet, t, opt.ac_samples);
            const Scalar expected = rep.S * t.gamma;
            const bool single = d.displacement.atoms.size() == 1 && d.displacement.continuous.empty();
            d.certificates.push_back(
                {"xi*P of f_pl is a single atom", std::to_string(d.displacement.atoms.size()), "=", "1", single});
            if (single) {
                d.certificates.push_back(certify("atom of xi*P = S(f) gamma", d.displacement.atoms[0].value, "=",
                                                 expected));
            }
            d.tower = std::move(t);
            rep.depths.push_back(std::move(d));
        }
    } else {
        rep.case_number = 2;
        if (!f.piecewise_constant()) throw CaseUnsupported("S(f) = 0 is supported for piecewise-constant f only");
        const auto bps = f.breakpoints();
        for (std::size_t i = 0; i < rep.jumps.size(); ++i) {
            if (rep.jumps[i].is_zero()) continue;
            rep.betas.push_back(bps[i]);
        }
        rep.r = static_cast<int>(rep.betas.size());
        std::vector<Scalar> nz;
        for (const Scalar& j : rep.jumps)
            if (!j.is_zero()) nz.push_back(j);
        for (std::size_t i = 0; i < nz.size(); ++i)
            for (std::size_t j = i + 1; j < nz.size(); ++j)
                if ((nz[i] + nz[j]).is_zero()) {
                    throw InvalidInput("jumps " + nz[i].str() + " and " + nz[j].str() + " have opposite values");
                }
        if (rep.r < 3) throw InvalidInput("case S(f) = 0 needs r >= 3 discontinuities, got " + std::to_string(rep.r));
        rep.caveats.push_back("capture of the discontinuities is tested at each computed depth");
        TowerFamily fam;
        try {
            fam = build_W_constant(iet, epsilon, rep.r, budget, opt.towers);
        } catch (const BudgetExhausted& e) {
            rep.note = e.what();
            return rep;
        }
        rep.params = fam.params;
        for (RigidityTower& t : fam.towers) {
            DepthReport d;
            d.a = center_on_tower(f, t);
            d.displacement = displacement_distribution(f, iet, t, opt.cell_budget);
            d.displacement_f = d.displacement;
            try {
                d.windows = discontinuity_windows(iet, t, rep.betas);
                d.capture = "captured";
                // Each window carries the jump of its discontinuity.
                std::vector<Atom> expect;
                const Scalar per = t.displacement * Scalar(t.q) / t.measure;
                Scalar nonzero;
                for (const Scalar& j : nz) {
                    expect.push_back({j, per});
                    nonzero += per;
                }
                expect.push_back({Scalar(0), Scalar(1) - nonzero});
                const EmpiricalMeasure want = EmpiricalMeasure::from_atoms(std::move(expect));
                bool match = want.atoms.size() == d.displacement.atoms.size() && d.displacement.continuous.empty();
                for (std::size_t i = 0; match && i < want.atoms.size(); ++i) {
                    match = want.atoms[i].value == d.displacement.atoms[i].value &&
                            want.atoms[i].mass == d.displacement.atoms[i].mass;
                }
                d.certificates.push_back({"xi*P atoms equal {0} and the jumps with window masses",
                                          match ? "1" : "0", "=", "1", match});
                d.certificates.push_back(certify("r (lambda_d - lambda_1) q / Leb(W) > (1 - Leb(W)) / Leb(W)",
                                                 nonzero, ">", (Scalar(1) - t.measure) / t.measure));
            } catch (const NotCaptured& e) {
                d.capture = std::string("not captured at l = ") + std::to_string(e.index());
            }
            d.tower = std::move(t);
            rep.depths.push_back(std::move(d));
        }
    }

    if (rep.depths.size() >= 2) {
        std::vector<RigidityTower> ts;
        for (const DepthReport& d : rep.depths) ts.push_back(d.tower);
        rep.wl = wl_report(ts, f, iet);
    }
    const DepthReport* deepest = nullptr;
    for (const DepthReport& d : rep.depths)
        if (rep.case_number == 1 || d.capture == "captured") deepest = &d;
    if (!deepest) {
        rep.note = "no computed depth captures every discontinuity";
        return rep;
    }
    rep.criterion = check_glwynik(deepest->displacement, deepest->tower.measure);
    rep.verdict = rep.criterion->verdict;
    const bool certified = deepest->tower.certified() &&
                           std::all_of(deepest->certificates.begin(), deepest->certificates.end(),
                                       [](const Certificate& c) { return c.holds; });
    if (rep.verdict == Verdict::Satisfied && !certified) {
        rep.verdict = Verdict::Inconclusive;
        rep.note = "criterion inequality holds but a tower certificate failed";
    }
    return rep;
}

}  // namespace ietflow

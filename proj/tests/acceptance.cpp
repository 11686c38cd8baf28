// One PASS/FAIL line per acceptance criterion. Exit status is nonzero if any line fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "ietflow/errors.hpp"
#include "ietflow/joinings.hpp"

using namespace ietflow;

namespace {

// Pinned tolerances and sizes.
constexpr int kRauzyCases = 100;
constexpr int kRauzyMaxSteps = 12;
constexpr double kRauzySeconds = 60;
constexpr int kAverageRoofs = 20;
constexpr int kAveragePoints = 100;
constexpr double kAverageSeconds = 60;
constexpr double kCase1Seconds = 120;
constexpr double kCase2Seconds = 300;
constexpr int kCocycleCases = 1000;
constexpr int kFlowCases = 1000;
constexpr std::int64_t kJoiningSamples = 1'000'000;
constexpr std::uint64_t kJoiningSeed = 12345;
constexpr double kJoiningSeconds = 600;
constexpr int kCalibrationSeeds = 100;
constexpr int kCalibrationNeeded = 95;
constexpr std::int64_t kCalibrationSamples = 20000;
const mpq_class kEpsilon(2, 5);  // 1 - eps > 1/2

int failures = 0;

struct Outcome {
    bool pass = false;
    std::string detail;
};

void report(const std::string& id, const std::string& name, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::printf("%s %-4s %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", id.c_str(), name.c_str(), o.detail.c_str(),
                secs);
    std::fflush(stdout);
}

double elapsed(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <class... Args>
std::string fmt(const char* f, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Permutation random_irreducible(std::mt19937_64& rng, int d) {
    std::vector<int> img(static_cast<std::size_t>(d));
    for (;;) {
        for (int i = 0; i < d; ++i) img[static_cast<std::size_t>(i)] = i;
        std::shuffle(img.begin(), img.end(), rng);
        Permutation p(img);
        if (is_irreducible(p)) return p;
    }
}

// Rational lengths summing to 1 with denominator below 2^32; small weights make connections likely.
std::vector<Scalar> random_lengths(std::mt19937_64& rng, int d, std::uint64_t max_weight = 1u << 20) {
    std::vector<long> w(static_cast<std::size_t>(d));
    long total = 0;
    for (long& v : w) {
        v = static_cast<long>(rng() % max_weight) + 1;
        total += v;
    }
    std::vector<Scalar> lam;
    for (long v : w) lam.emplace_back(v, total);
    return lam;
}

Scalar random_unit(std::mt19937_64& rng, long den = 1000003) {
    return Scalar(static_cast<long>(rng() % static_cast<std::uint64_t>(den)), den);
}

// Positive piecewise-affine roof with 1 to 4 pieces, values in [1, 3], slopes in [-1/2, 1/2].
PiecewiseRoof random_roof(std::mt19937_64& rng) {
    const int k = 1 + static_cast<int>(rng() % 4);
    std::vector<Scalar> cuts{Scalar(0)};
    while (static_cast<int>(cuts.size()) < k) {
        const Scalar c(static_cast<long>(rng() % 999) + 1, 1000);
        if (std::find(cuts.begin(), cuts.end(), c) == cuts.end()) cuts.push_back(c);
    }
    std::sort(cuts.begin(), cuts.end(), [](const Scalar& a, const Scalar& b) { return compare(a, b) < 0; });
    std::vector<RoofPiece> pieces;
    for (const Scalar& c : cuts) {
        pieces.push_back({c, Scalar(static_cast<long>(rng() % 201) + 100, 100),
                          Scalar(static_cast<long>(rng() % 101) - 50, 100)});
    }
    return PiecewiseRoof(std::move(pieces));
}

struct RauzyCase {
    Iet iet;
    InductionTrace trace;
};

const std::vector<RauzyCase>& rauzy_corpus() {
    static const std::vector<RauzyCase> corpus = [] {
        std::mt19937_64 rng(20240601);
        std::vector<RauzyCase> out;
        for (int c = 0; c < kRauzyCases; ++c) {
            const int d = 2 + c % 4;
            const Permutation pi = random_irreducible(rng, d);
            const auto lam = random_lengths(rng, d, c % 4 == 3 ? 6 : 1u << 20);
            InductionTrace tr(pi, lam);
            for (int n = 0; n < kRauzyMaxSteps; ++n) {
                try {
                    tr.extend(1);
                } catch (const KeaneViolation&) {
                    break;
                }
            }
            out.push_back({Iet(pi, lam), std::move(tr)});
        }
        return out;
    }();
    return corpus;
}

Outcome rauzy_invariants() {
    const auto t0 = std::chrono::steady_clock::now();
    int bad = 0, keane = 0;
    std::int64_t steps = 0;
    for (const auto& c : rauzy_corpus()) {
        const auto& tr = c.trace;
        steps += tr.n();
        if (tr.n() < kRauzyMaxSteps) ++keane;
        const bool recon = tr.cumulative() * tr.lambda_n() == c.iet.lambda();
        const bool det = tr.cumulative().determinant() == 1;
        const auto h = tr.heights_domain();
        const auto lam = tr.lambda_n_domain();
        Scalar mass;
        for (std::size_t j = 0; j < h.size(); ++j) mass += Scalar(mpq_class(h[j])) * lam[j];
        if (!(recon && det && mass == Scalar(1))) ++bad;
    }
    const double secs = elapsed(t0);
    return {bad == 0 && secs <= kRauzySeconds,
            fmt("%d cases, %lld steps, %d stopped by a connection, %d violations", kRauzyCases,
                static_cast<long long>(steps), keane, bad)};
}

Outcome tower_partition() {
    int bad = 0;
    std::size_t levels = 0;
    for (const auto& c : rauzy_corpus()) {
        std::vector<Interval> all;
        Scalar mass;
        bool inside = true;
        for (const auto& tw : tower_decomposition(c.iet, c.trace)) {
            for (const Interval& l : tw.levels()) {
                const int k = c.iet.index_of(l.lo);
                inside = inside && c.iet.interval(k).contains(l);
                mass += l.length();
                all.push_back(l);
            }
        }
        levels += all.size();
        if (!(inside && pairwise_disjoint(all) && mass == Scalar(1))) ++bad;
    }
    return {bad == 0, fmt("%d cases, %zu levels, %d with a defect", kRauzyCases, levels, bad)};
}

std::vector<std::pair<Iet, RigidityTower>> average_towers() {
    std::vector<std::pair<Iet, RigidityTower>> out;
    const Iet shifted = fixtures::shifted_rotation();
    for (auto& t : build_W_linear(shifted, kEpsilon, 200, fixtures::shifted_rotation_options(2)).towers) {
        out.emplace_back(shifted, std::move(t));
    }
    TowerOptions one;
    one.max_towers = 1;
    const Iet rot = fixtures::recurrent_rotation();
    out.emplace_back(rot, build_W_linear(rot, kEpsilon, 200, one).towers.front());
    return out;
}

Outcome average_bounds() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto towers = average_towers();
    std::mt19937_64 rng(31);
    int bad = 0;
    std::string qs;
    for (const auto& [iet, t] : towers) qs += (qs.empty() ? "" : ",") + std::to_string(t.q);
    for (int i = 0; i < kAverageRoofs; ++i) {
        const auto& [iet, t] = towers[static_cast<std::size_t>(i) % towers.size()];
        const PiecewiseRoof f = random_roof(rng);
        const Scalar a = center_on_tower(f, t);
        const Scalar var = f.variation();
        for (int p = 0; p < kAveragePoints; ++p) {
            const auto k = static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(t.q));
            const Scalar x = t.J.lo + t.J.length() * random_unit(rng) + t.shifts[k];
            const Scalar fq = birkhoff_sum(f, iet, t.q, x);
            const Scalar f2q = fq + birkhoff_sum(f, iet, t.q, iet.apply(x, t.q));
            if (compare((fq - a).abs(), var) > 0 || compare((f2q - a - a).abs(), var + var) > 0) ++bad;
        }
    }
    const double secs = elapsed(t0);
    return {bad == 0 && secs <= kAverageSeconds,
            fmt("%d roofs x %d points on towers q = %s, %d violations", kAverageRoofs, kAveragePoints, qs.c_str(), bad)};
}

// Golden towers: the lines below record what the construction yields.
Outcome golden_case1() {
    const Iet g = fixtures::golden();
    const auto fam = build_W_linear(g, kEpsilon, 200);
    PipelineOptions o;
    const auto rep = theorem_pipeline(g, fixtures::linear_roof(), kEpsilon, 200, o);
    return {fam.towers.size() >= 2 && rep.verdict == Verdict::Satisfied,
            fmt("%zu towers (%s), verdict %s", fam.towers.size(), fam.stop_reason.c_str(), to_string(rep.verdict))};
}

Outcome shifted_case1() {
    const auto t0 = std::chrono::steady_clock::now();
    const Iet t = fixtures::shifted_rotation();
    const auto f = fixtures::linear_roof();
    const auto fam = build_W_linear(t, kEpsilon, 200, fixtures::shifted_rotation_options(3));
    bool ok = fam.towers.size() >= 2;
    std::mt19937_64 rng(4);
    std::string qs;
    for (const auto& tw : fam.towers) {
        qs += (qs.empty() ? "" : ",") + std::to_string(tw.q);
        ok = ok && compare(tw.measure, Scalar(1 - kEpsilon)) > 0;
        ok = ok && tw.displacement == tw.gamma / Scalar(tw.q);
        for (int s = 0; s < 8; ++s) {
            const auto k = static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(tw.q));
            const Scalar x = tw.J.lo + tw.J.length() * random_unit(rng) + tw.shifts[k];
            const auto j = static_cast<std::int64_t>(rng() % 50);
            ok = ok && t.apply(x, tw.q + j) - t.apply(x, j) == tw.displacement;
        }
        const auto m = displacement_distribution(f, t, tw);
        ok = ok && m.continuous.empty() && m.atoms.size() == 1 && m.atoms[0].value == tw.gamma &&
             m.atoms[0].mass == Scalar(1);
    }
    PipelineOptions o;
    o.towers = fixtures::shifted_rotation_options(3);
    const auto rep = theorem_pipeline(t, f, kEpsilon, 200, o);
    ok = ok && rep.verdict == Verdict::Satisfied;
    const double secs = elapsed(t0);
    return {ok && secs <= kCase1Seconds,
            fmt("q = %s, Leb(W) > 1 - eps, T^(q+j)x - T^j x = gamma/q, single atom at gamma, verdict %s",
                qs.c_str(), to_string(rep.verdict))};
}

Outcome case2() {
    const auto t0 = std::chrono::steady_clock::now();
    const int r = 3;
    const auto c = fixtures::constant_case(r);
    TowerOptions one;
    one.max_towers = 1;
    const auto tower = build_W_constant(c.iet, c.epsilon, r, 200, one).towers.front();
    const auto betas = fixtures::captured_betas(tower, r);
    const std::vector<Scalar> jumps{Scalar(1), Scalar(1, 2), Scalar(1, 3)};
    const auto f = fixtures::step_roof(betas, jumps);
    PipelineOptions o;
    o.towers = one;
    const auto rep = theorem_pipeline(c.iet, f, c.epsilon, 200, o);
    if (rep.depths.empty() || !rep.criterion) return {false, "no depth reached"};
    const auto& d = rep.depths.back();
    const auto& t = d.tower;
    const std::vector<Scalar> allowed{Scalar(0), Scalar(1), Scalar(1, 2), Scalar(1, 3)};
    bool support = d.displacement.continuous.empty();
    for (const auto& a : d.displacement.atoms) {
        support = support && std::find(allowed.begin(), allowed.end(), a.value) != allowed.end();
    }
    // One window tower has measure (lambda_d - lambda_1)(s_1 + s_d) at the tower depth.
    const Scalar one_window = t.lambda_gap * Scalar(mpq_class(t.heights.front() + t.heights.back()));
    bool masses = d.windows && d.windows->total_mass == Scalar(r) * one_window;
    for (const Scalar& j : jumps) masses = masses && d.displacement.mass_at(j) * t.measure == one_window;
    const bool mass_ok = compare(rep.criterion->nonzero_mass, rep.criterion->threshold) > 0;
    const double secs = elapsed(t0);
    return {support && masses && mass_ok && rep.verdict == Verdict::Satisfied && secs <= kCase2Seconds,
            fmt("q = %lld, support in {0,1,1/2,1/3}: %s, window masses exact: %s, nonzero mass %.6g > %.6g, "
                "verdict %s",
                static_cast<long long>(t.q), support ? "yes" : "no", masses ? "yes" : "no",
                rep.criterion->nonzero_mass.to_double(), rep.criterion->threshold.to_double(),
                to_string(rep.verdict))};
}

Outcome negative_controls() {
    const auto c = fixtures::constant_case(3);
    const std::vector<Scalar> betas{Scalar(1, 4), Scalar(1, 2)};
    bool opposite = false;
    try {
        theorem_pipeline(c.iet, fixtures::step_roof(betas, {Scalar(1), Scalar(-1)}), c.epsilon, 200);
    } catch (const InvalidInput& e) {
        opposite = std::string(e.what()).find("opposite") != std::string::npos;
    }
    const auto dirac = EmpiricalMeasure::from_atoms({{Scalar(0), Scalar(1)}});
    const bool mass = check_glwynik(dirac, Scalar(9, 10)).verdict == Verdict::FailedMass;
    const auto sym = EmpiricalMeasure::from_atoms(
        {{Scalar(-1, 2), Scalar(1, 4)}, {Scalar(0), Scalar(1, 2)}, {Scalar(1, 2), Scalar(1, 4)}});
    const bool symmetric = check_glwynik(sym, Scalar(9, 10)).verdict == Verdict::FailedSymmetry;
    return {opposite && mass && symmetric, fmt("opposite jumps rejected: %s, {(0,1)} -> FAILED_MASS: %s, "
                                               "symmetric atoms -> FAILED_SYMMETRY: %s",
                                               opposite ? "yes" : "no", mass ? "yes" : "no",
                                               symmetric ? "yes" : "no")};
}

Outcome identities() {
    std::mt19937_64 rng(77);
    int cocycle_bad = 0;
    for (int i = 0; i < kCocycleCases; ++i) {
        const int d = 2 + static_cast<int>(rng() % 4);
        const Iet t(random_irreducible(rng, d), random_lengths(rng, d));
        const PiecewiseRoof f = random_roof(rng);
        const Scalar x = random_unit(rng);
        const auto m = static_cast<std::int64_t>(rng() % 40), n = static_cast<std::int64_t>(rng() % 40);
        if (!(birkhoff_sum(f, t, m + n, x) == birkhoff_sum(f, t, m, x) + birkhoff_sum(f, t, n, t.apply(x, m)))) {
            ++cocycle_bad;
        }
    }
    const Iet g = fixtures::golden();
    const auto f = fixtures::two_slope_roof();
    int flow_bad = 0;
    for (int i = 0; i < kFlowCases; ++i) {
        const Scalar x = random_unit(rng);
        const FlowPoint p{x, f.evaluate(x) * random_unit(rng, 1009)};
        const Scalar s(static_cast<long>(rng() % 1001) - 500, 97), u(static_cast<long>(rng() % 1001) - 500, 89);
        if (!(flow(f, g, flow(f, g, p, s), u) == flow(f, g, p, s + u))) ++flow_bad;
    }
    return {cocycle_bad == 0 && flow_bad == 0,
            fmt("%d cocycle cases, %d violations; %d flow cases, %d violations", kCocycleCases, cocycle_bad,
                kFlowCases, flow_bad)};
}

Outcome golden_ac() {
    const Iet g = fixtures::golden();
    const auto fam = build_W_linear(g, kEpsilon, 200);
    if (fam.towers.size() < 3) {
        return {false, fmt("%zu golden towers (%s), need 3", fam.towers.size(), fam.stop_reason.c_str())};
    }
    const auto ac = decompose(fixtures::two_slope_roof()).ac;
    bool dec = true;
    for (std::size_t i = 1; i < 3; ++i) {
        dec = dec && compare(ac_rigidity_check(ac, g, fam.towers[i]).sup, ac_rigidity_check(ac, g, fam.towers[i - 1]).sup) < 0;
    }
    return {dec, dec ? "strictly decreasing" : "not decreasing"};
}

Outcome shifted_ac() {
    const Iet t = fixtures::shifted_rotation();
    const auto fam = build_W_linear(t, kEpsilon, 200, fixtures::shifted_rotation_options(3));
    if (fam.towers.size() < 3) return {false, fmt("%zu towers", fam.towers.size())};
    const auto ac = decompose(fixtures::two_slope_roof()).ac;
    std::vector<AcRigidity> r;
    for (const auto& tw : fam.towers) r.push_back(ac_rigidity_check(ac, t, tw, 4));
    bool ok = true;
    for (std::size_t i = 0; i < r.size(); ++i) {
        ok = ok && r[i].samples_agree && compare(r[i].sampled_sup, r[i].sup) <= 0;
        if (i > 0) ok = ok && compare(r[i].sup, r[i - 1].sup) < 0;
    }
    return {ok, fmt("sup over W at q = %lld, %lld, %lld: %.3g, %.3g, %.3g", static_cast<long long>(fam.towers[0].q),
                    static_cast<long long>(fam.towers[1].q), static_cast<long long>(fam.towers[2].q),
                    r[0].sup.to_double(), r[1].sup.to_double(), r[2].sup.to_double())};
}

// Six full-height strips of width 1/50 spread over [0, 1).
std::vector<FlowRect> strips() {
    std::vector<FlowRect> rects;
    for (long k = 0; k < 6; ++k) {
        const Scalar lo = Scalar(k, 6) + Scalar(1, 30);
        rects.push_back({{lo, lo + Scalar(1, 50)}, {Scalar(0), Scalar(2)}});
    }
    return rects;
}

Outcome joining_witness(const Iet& t, const TowerOptions& opt, const char* what) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto f = fixtures::linear_roof();
    const auto fam = build_W_linear(t, kEpsilon, 200, opt);
    if (fam.towers.size() < 2) {
        return {false, fmt("%s: %zu towers (%s), need 2", what, fam.towers.size(), fam.stop_reason.c_str())};
    }
    std::vector<Scalar> a;
    for (const auto& tw : fam.towers) a.push_back(center_on_tower(f, tw));
    const auto rep = joining_convergence_check(f, t, fam.towers, strips(), a, kJoiningSamples, kJoiningSeed);
    std::ostringstream s;
    s << what << ": total |LHS-RHS|";
    for (std::size_t k = 0; k < rep.depths.size(); ++k) {
        s << (k ? " -> " : " ") << fmt("%.4g (3 sigma %.2g, q = %lld)", rep.total_discrepancy[k],
                                       3 * rep.total_stderr[k], static_cast<long long>(fam.towers[k].q));
    }
    const double secs = elapsed(t0);
    return {rep.decreasing && secs <= kJoiningSeconds, s.str()};
}

Outcome calibration() {
    const Iet g = fixtures::golden();
    const auto f = fixtures::two_slope_roof();
    const FlowRect R{{Scalar(1, 7), Scalar(5, 6)}, {Scalar(1, 3), Scalar(9, 4)}};
    const double exact = rect_measure(f, R).to_double();
    int within = 0;
    for (int seed = 1; seed <= kCalibrationSeeds; ++seed) {
        const auto e = triple_correlation(f, g, R, R, R, Scalar(0), Scalar(0), kCalibrationSamples,
                                          static_cast<std::uint64_t>(seed));
        if (std::fabs(e.value - exact) <= 3 * e.stderr_) ++within;
    }
    return {within >= kCalibrationNeeded,
            fmt("%d of %d seeds within 3 sigma of %.6f (need %d)", within, kCalibrationSeeds, exact,
                kCalibrationNeeded)};
}

}  // namespace

int main() {
    report("1", "Rauzy invariants", rauzy_invariants);
    report("2", "tower partition", tower_partition);
    report("3", "tower-average bounds", average_bounds);
    report("4", "case 1 end to end, golden 2-IET", golden_case1);
    report("4s", "case 1 end to end, shifted rotation", shifted_case1);
    report("5", "case 2 end to end", case2);
    report("6", "negative controls", negative_controls);
    report("7", "cocycle and flow identities", identities);
    report("8", "ac rigidity decay, golden 2-IET", golden_ac);
    report("8s", "ac rigidity decay, shifted rotation", shifted_ac);
    report("9", "joining witness, golden 2-IET",
           [] { return joining_witness(fixtures::golden(), TowerOptions{}, "golden"); });
    report("9s", "joining witness, shifted rotation", [] {
        return joining_witness(fixtures::shifted_rotation(), fixtures::shifted_rotation_options(2), "shifted");
    });
    report("10", "sampling calibration", calibration);
    std::printf("%d failing line(s)\n", failures);
    return failures == 0 ? 0 : 1;
}

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ietflow/iet.hpp"
#include "ietflow/roof.hpp"
#include "ietflow/towers.hpp"

namespace ietflow {

struct Atom {
    Scalar value;
    Scalar mass;
};

/// Uniform mass spread over [lo, hi) (or [hi, lo) when decreasing).
struct Segment {
    Scalar lo;
    Scalar hi;
    Scalar mass;
};

/*
 * Finite measure on R: atoms sorted by value with gaps above cluster_tol,
 * plus uniformly spread pieces. The total may be below 1 for restricted
 * measures.
 */
struct EmpiricalMeasure {
    std::vector<Atom> atoms;
    std::vector<Segment> continuous;
    mpq_class cluster_tol = 0;
    Scalar total;

    /// Sorts, merges atoms closer than tol and sums the total.
    static EmpiricalMeasure from_atoms(std::vector<Atom> atoms, const mpq_class& tol = 0);
    Scalar continuous_mass() const;
    Scalar mass_at(const Scalar& v) const;
};

struct PairAtom {
    Scalar x;
    Scalar y;
    Scalar mass;
};

/// Uniform mass along the segment from (x0, y0) to (x1, y1).
struct PairSegment {
    Scalar x0, y0, x1, y1;
    Scalar mass;
};

struct PairMeasure {
    std::vector<PairAtom> atoms;
    std::vector<PairSegment> segments;
    Scalar total;
    /// Second moments: integral over W of |f^(q) - a|^2 and |f^(2q) - 2a|^2 (unnormalized).
    Scalar moment_q;
    Scalar moment_2q;

    /// Pushforward under xi(x, y) = x - 2y.
    EmpiricalMeasure push_xi() const;
};

/// Exact pushforward of x -> f^(q)(T^q x) - f^(q)(x) under normalized Lebesgue measure on W.
EmpiricalMeasure displacement_distribution(const PiecewiseAffine& f, const Iet& iet, const RigidityTower& t,
                                           std::size_t cell_budget = 1u << 20);

/// The displacement at x = T^k y, y in J, from the closed form on the tower.
Scalar displacement_at(const PiecewiseAffine& f, const RigidityTower& t, std::int64_t k, const Scalar& y);

/// Exact joint pushforward of (f^(2q) - 2a, f^(q) - a) under normalized Lebesgue measure on W.
PairMeasure pair_distribution(const PiecewiseAffine& f, const Iet& iet, const RigidityTower& t, const Scalar& a,
                              std::size_t cell_budget = 1u << 22);

struct AcRigidity {
    Scalar sup;          // exact sup over W
    Scalar sampled_sup;  // brute-force Birkhoff sums at the sample points
    std::int64_t samples = 0;
    bool samples_agree = true;  // brute force equals the closed form at every sample
};

/// g must be continuous with integral of Dg equal to 0.
AcRigidity ac_rigidity_check(const PiecewiseAffine& g, const Iet& iet, const RigidityTower& t,
                             std::int64_t samples = 8);

struct TowerDiagnostics {
    std::int64_t depth = 0;
    std::int64_t q = 0;
    Scalar measure;
    Scalar J_length;
    Scalar boundary_measure;
    Scalar sup_disp_q;
    Scalar sup_disp_2q;
    Scalar induced_length;
    Scalar a;
    Scalar moment_q;
    Scalar moment_2q;
    Scalar moment_q_bound;   // Var(f)^2 Leb(W)
    Scalar moment_2q_bound;  // 4 Var(f)^2 Leb(W)
};

struct WlReport {
    std::vector<TowerDiagnostics> towers;
    bool boundary_decreasing = false;
    bool displacement_decreasing = false;
    bool boundary_within_2J = false;
    bool displacement_within_I = false;
    bool moments_bounded = false;
};

WlReport wl_report(const std::vector<RigidityTower>& towers, const PiecewiseAffine& f, const Iet& iet);

enum class Verdict { Satisfied, FailedMass, FailedSymmetry, Inconclusive };

const char* to_string(Verdict v);

struct CriterionReport {
    Scalar alpha;
    std::vector<Atom> atoms;
    Scalar c0;
    Scalar nonzero_mass;
    Scalar threshold;
    std::vector<std::pair<int, int>> symmetry_violations;  // 1-based atom indices
    Verdict verdict = Verdict::Inconclusive;
};

/// Throws NotAtomic if the continuous mass exceeds atomic_tol.
CriterionReport check_glwynik(const EmpiricalMeasure& xi_P, const Scalar& alpha, const mpq_class& atomic_tol = 0);

struct PipelineOptions {
    TowerOptions towers;
    std::int64_t keane_depth = 64;
    std::int64_t ac_samples = 4;
    std::size_t cell_budget = 1u << 20;
};

struct DepthReport {
    RigidityTower tower;
    Scalar a;
    EmpiricalMeasure displacement;     // of f (case 2) or f_pl (case 1)
    EmpiricalMeasure displacement_f;   // of f itself
    std::optional<AcRigidity> ac;      // case 1 only
    std::optional<Windows> windows;    // case 2 only
    std::string capture;               // "captured", "not captured at l = ..." or ""
    std::vector<Certificate> certificates;
};

struct PipelineReport {
    int case_number = 0;
    Scalar S;
    int r = 0;
    std::vector<Scalar> jumps;
    std::vector<Scalar> betas;
    TowerParams params;
    std::vector<DepthReport> depths;
    std::optional<WlReport> wl;
    std::optional<CriterionReport> criterion;
    Verdict verdict = Verdict::Inconclusive;
    std::string note;
    std::vector<std::string> caveats;
};

/*
 * S(f) != 0: case 1 via build_W_linear (f must be continuous over the
 * exchanged intervals). S(f) = 0: case 2 via build_W_constant, requiring a
 * piecewise-constant f with r >= 3 jumps and no two opposite jumps.
 * A budget without recurrence hits gives an INCONCLUSIVE report.
 */
PipelineReport theorem_pipeline(const Iet& iet, const PiecewiseRoof& f, const mpq_class& epsilon,
                                std::int64_t budget, const PipelineOptions& opt = {});

}  // namespace ietflow

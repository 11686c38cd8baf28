#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ietflow/iet.hpp"
#include "ietflow/int_matrix.hpp"
#include "ietflow/interval_set.hpp"
#include "ietflow/rauzy.hpp"
#include "ietflow/roof.hpp"

namespace ietflow {

/// Levels T^i(base), 0 <= i < height, each inside one exchanged interval.
struct RokhlinTower {
    Interval base;
    std::int64_t height = 0;
    std::shared_ptr<const Iet> iet;

    /// Computes the levels, throwing DomainError if one straddles a discontinuity.
    std::vector<Interval> levels() const;
};

/// d towers over the induced intervals I^n_j (domain order) with heights s^n_j.
std::vector<RokhlinTower> tower_decomposition(const Iet& iet, const InductionTrace& trace);

/// An exact inequality or identity with both sides rendered as exact strings.
struct Certificate {
    std::string name;
    std::string lhs;
    std::string relation;  // "<", "<=", "=", ">", ">="
    std::string rhs;
    bool holds = false;
};

Certificate certify(std::string name, const Scalar& lhs, const std::string& relation, const Scalar& rhs);

enum class TowerCase { Linear, Constant };

/*
 * Rigidity tower W = union of T^i J, 0 <= i < q, with J = D ∩ T^-q D ∩ T^-2q D
 * over the base D = I^N_1. T^i acts on D as the translation by shifts[i],
 * and shifts[q] is the constant displacement T^q x - x on W.
 */
struct RigidityTower {
    TowerCase kind = TowerCase::Linear;
    Interval delta;
    Interval J;
    std::int64_t q = 0;
    std::vector<Scalar> shifts;
    Scalar displacement;
    Scalar measure;
    Scalar induced_length;  // |I^N|
    Scalar gamma;           // linear case: q * displacement
    Scalar lambda_gap;      // constant case: lambda_d^N - lambda_1^N
    std::int64_t n_index = 0;  // recurrence hit r
    std::int64_t depth = 0;    // N = m + r
    std::vector<Scalar> lambda_depth;  // domain order
    std::vector<mpz_class> heights;    // domain order
    mpq_class rho;                     // balance ratio of A^N
    std::vector<Certificate> certificates;

    Interval level(std::int64_t i) const { return J.shifted(shifts[static_cast<std::size_t>(i)]); }
    std::vector<Interval> levels() const;
    IntervalSet W() const { return IntervalSet(levels()); }
    bool certified() const;
};

struct TowerOptions {
    std::size_t max_towers = 3;
    std::int64_t positive_return_steps = 4096;
    std::int64_t max_height = 4'000'000;
    std::optional<Permutation> pi0;
    std::optional<std::vector<Scalar>> lambda0;
};

/// Parameters fixed before the recurrence search.
struct TowerParams {
    Permutation pi0;
    std::vector<Scalar> lambda0;
    std::int64_t m = 0;
    IntMatrix B;  // domain-order positive return matrix
    mpq_class rho;
    mpq_class epsilon;
    mpq_class delta;
    mpq_class delta_prime;  // constant case only
    std::vector<Certificate> certificates;
};

struct TowerFamily {
    TowerParams params;
    std::vector<RigidityTower> towers;
    std::int64_t steps_used = 0;
    std::string stop_reason;
};

/// Largest delta on the 2^-32 grid with 6 delta < eps and
/// (1 - 3 delta)(1 - rho delta / (1 - delta)) > 1 - eps.
mpq_class choose_delta_linear(const mpq_class& eps, const mpq_class& rho);

/// min(1/(10 rho), 1/(8(2r+1))).
mpq_class constant_epsilon_bound(const mpq_class& rho, int r);

/// delta: largest 2^-32 multiple below eps/2; delta' = delta - eps/(8 rho), clipped into (eps/3, eps/2).
std::pair<mpq_class, mpq_class> choose_deltas_constant(const mpq_class& eps, const mpq_class& rho, int r);

TowerFamily build_W_linear(const Iet& iet, const mpq_class& epsilon, std::int64_t budget,
                           const TowerOptions& opt = {});

TowerFamily build_W_constant(const Iet& iet, const mpq_class& epsilon, int r, std::int64_t budget,
                             const TowerOptions& opt = {});

/// J_l = [(2l-1)|J|/(2r+1), 2l|J|/(2r+1)) for l = 1..r.
std::vector<Interval> subtower_bases(const RigidityTower& t, int r);

struct WindowTower {
    Scalar beta;
    std::int64_t k = 0;  // T^-k beta lies in J_l
    std::vector<Interval> levels;  // T^-i [beta - c, beta), 0 <= i < q
};

struct Windows {
    std::vector<WindowTower> windows;
    Scalar total_mass;
    std::vector<Certificate> certificates;
};

/// Throws NotCaptured{l} for the first beta_l outside W^l; InvalidInput for repeated betas.
Windows discontinuity_windows(const Iet& iet, const RigidityTower& t, const std::vector<Scalar>& betas);

/// Index k < q with T^-k beta in J_l, if any.
std::optional<std::int64_t> capture_index(const RigidityTower& t, const Interval& Jl, const Scalar& beta);

struct RigidityDiagnostic {
    Scalar sup_disp_q;
    Scalar sup_disp_2q;
    Scalar boundary_measure;
    std::int64_t levels_checked = 0;
};

/// Brute-force T^q and T^2q on sample_levels evenly spaced levels; exact boundary measure.
RigidityDiagnostic rigidity_diagnostic(const Iet& iet, const RigidityTower& t, std::int64_t sample_levels = 16);

/// a = (1/|base|) * integral of f over the tower levels; f must live on [0, 1).
Scalar center_on_tower(const PiecewiseAffine& f, const Interval& base, const std::vector<Interval>& levels);
Scalar center_on_tower(const PiecewiseAffine& f, const RokhlinTower& t);
/// Average over the full tower T^i D, 0 <= i < q.
Scalar center_on_tower(const PiecewiseAffine& f, const RigidityTower& t);

}  // namespace ietflow

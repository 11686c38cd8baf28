#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "ietflow/errors.hpp"
#include "ietflow/int_matrix.hpp"
#include "ietflow/permutation.hpp"
#include "ietflow/scalar.hpp"

namespace ietflow {

/// TOP: the image-last interval is longer, so the domain-last interval is
/// cut off. BOTTOM: the domain-last interval is longer.
enum class StepKind { Top, Bottom };

const char* to_string(StepKind k);

/*
 * Rauzy-Veech state with labeled intervals. Labels are the original
 * domain positions; lengths are stored by label, so every elementary
 * matrix is I + E_{winner,loser} with determinant 1.
 */
struct RauzyState {
    std::vector<int> top;     // label at each domain position
    std::vector<int> bottom;  // label at each image slot
    std::vector<Scalar> lambda;

    static RauzyState start(const Permutation& pi, std::vector<Scalar> lambda);
    int size() const noexcept { return static_cast<int>(top.size()); }
    /// Position-form permutation of the current exchange.
    Permutation pi() const;
    /// Lengths in domain order.
    std::vector<Scalar> lambda_domain() const;
    Scalar total() const;
};

struct InductionStep {
    StepKind kind;
    int winner;  // label whose length shrinks by the loser's
    int loser;   // label cut off this step
    IntMatrix matrix;
    Permutation result_pi;
    std::vector<Scalar> result_lambda;  // by label
};

/// Advances `st` by one step. Throws KeaneViolation (at_step = 1) on a tie.
InductionStep advance(RauzyState& st);

/// One step from (pi, lambda) with labels equal to the domain positions.
InductionStep induction_step(const Permutation& pi, const std::vector<Scalar>& lambda);

class InductionTrace {
public:
    InductionTrace(Permutation pi, std::vector<Scalar> lambda);

    /// Appends k steps. On a tie throws KeaneViolationWithTrace.
    void extend(std::int64_t k);

    std::int64_t n() const noexcept { return static_cast<std::int64_t>(steps_.size()); }
    const Permutation& pi0() const noexcept { return pi0_; }
    const std::vector<Scalar>& lambda0() const noexcept { return lambda0_; }
    const std::vector<InductionStep>& steps() const noexcept { return steps_; }
    const RauzyState& state() const noexcept { return state_; }
    Permutation pi_n() const { return state_.pi(); }
    /// Lengths after n steps, by label.
    const std::vector<Scalar>& lambda_n() const noexcept { return state_.lambda; }
    std::vector<Scalar> lambda_n_domain() const { return state_.lambda_domain(); }
    /// Labeled cumulative matrix A^1 ... A^n (det 1).
    const IntMatrix& cumulative() const noexcept { return cumulative_; }
    /// Cumulative matrix with columns in domain order of the induced exchange.
    IntMatrix cumulative_domain() const { return cumulative_.permute_columns(state_.top); }
    /// Return times s_j, domain order.
    std::vector<mpz_class> heights_domain() const { return cumulative_domain().column_sums(); }

private:
    Permutation pi0_;
    std::vector<Scalar> lambda0_;
    std::vector<InductionStep> steps_;
    IntMatrix cumulative_;
    RauzyState state_;
};

class KeaneViolationWithTrace : public KeaneViolation {
public:
    KeaneViolationWithTrace(const std::string& what, std::int64_t at_step, InductionTrace partial)
        : KeaneViolation(what, at_step), partial_(std::make_shared<InductionTrace>(std::move(partial))) {}
    const InductionTrace& partial() const noexcept { return *partial_; }

private:
    std::shared_ptr<InductionTrace> partial_;
};

InductionTrace induct(const Permutation& pi, const std::vector<Scalar>& lambda, std::int64_t n);

/// R(pi, lambda): one step, lengths in domain order scaled to sum 1.
std::pair<Permutation, std::vector<Scalar>> normalized_step(const Permutation& pi,
                                                            const std::vector<Scalar>& lambda);

/// Smallest n <= max_steps with A^n strictly positive and pi^n = pi.
std::pair<std::int64_t, InductionTrace> find_positive_return(const Permutation& pi,
                                                             const std::vector<Scalar>& lambda,
                                                             std::int64_t max_steps);

/// Combinatorial Rauzy move on a position-form permutation.
Permutation rauzy_move(const Permutation& pi, StepKind kind);

/// Breadth-first closure under both moves, sorted.
std::vector<Permutation> rauzy_class(const Permutation& pi);

using RecurrencePredicate = std::function<bool(const Permutation&, const std::vector<Scalar>&)>;

/*
 * Indices r >= 1 (increasing, at most max_hits) with R^r(pi, lambda)
 * satisfying the predicate. The predicate sees the permutation and the
 * exactly normalized lengths in domain order.
 */
std::vector<std::int64_t> recurrence_search(const Permutation& pi, const std::vector<Scalar>& lambda,
                                            const RecurrencePredicate& pred, std::int64_t max_steps,
                                            std::size_t max_hits);

}  // namespace ietflow

#include "ietflow/rauzy.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace ietflow {

namespace {

void move_after(std::vector<int>& row, int moving, int anchor) {
    row.erase(std::find(row.begin(), row.end(), moving));
    row.insert(std::find(row.begin(), row.end(), anchor) + 1, moving);
}

std::vector<Scalar> normalized(std::vector<Scalar> v) {
    Scalar t;
    for (const Scalar& x : v) t += x;
    for (Scalar& x : v) x /= t;
    return v;
}

}  // namespace

const char* to_string(StepKind k) { return k == StepKind::Top ? "top" : "bottom"; }

RauzyState RauzyState::start(const Permutation& pi, std::vector<Scalar> lambda) {
    if (!is_irreducible(pi)) throw InvalidInput("permutation " + pi.str() + " is reducible");
    if (static_cast<int>(lambda.size()) != pi.size()) throw InvalidInput("length vector size mismatch");
    for (const Scalar& l : lambda)
        if (l.sign() <= 0) throw InvalidInput("length " + l.str() + " is not positive");
    RauzyState st;
    const int d = pi.size();
    st.top.resize(static_cast<std::size_t>(d));
    st.bottom.resize(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) {
        st.top[static_cast<std::size_t>(k)] = k;
        st.bottom[static_cast<std::size_t>(pi(k))] = k;
    }
    st.lambda = std::move(lambda);
    return st;
}

Permutation RauzyState::pi() const {
    const int d = size();
    std::vector<int> slot(static_cast<std::size_t>(d));
    for (int s = 0; s < d; ++s) slot[static_cast<std::size_t>(bottom[static_cast<std::size_t>(s)])] = s;
    std::vector<int> img(static_cast<std::size_t>(d));
    for (int p = 0; p < d; ++p) img[static_cast<std::size_t>(p)] = slot[static_cast<std::size_t>(top[static_cast<std::size_t>(p)])];
    return Permutation(std::move(img));
}

std::vector<Scalar> RauzyState::lambda_domain() const {
    std::vector<Scalar> out;
    out.reserve(top.size());
    for (int l : top) out.push_back(lambda[static_cast<std::size_t>(l)]);
    return out;
}

Scalar RauzyState::total() const {
    Scalar t;
    for (const Scalar& x : lambda) t += x;
    return t;
}

InductionStep advance(RauzyState& st) {
    const int d = st.size();
    const int a = st.top.back();
    const int b = st.bottom.back();
    Scalar& la = st.lambda[static_cast<std::size_t>(a)];
    Scalar& lb = st.lambda[static_cast<std::size_t>(b)];
    const int c = compare(la, lb);
    if (c == 0) throw KeaneViolation("lengths of the last intervals coincide: " + la.str(), 1);
    InductionStep step{c > 0 ? StepKind::Bottom : StepKind::Top, 0, 0, IntMatrix::identity(d), {}, {}};
    if (c > 0) {
        la -= lb;
        step.winner = a;
        step.loser = b;
        move_after(st.bottom, b, a);
    } else {
        lb -= la;
        step.winner = b;
        step.loser = a;
        move_after(st.top, a, b);
    }
    step.matrix(step.winner, step.loser) = 1;
    step.result_pi = st.pi();
    step.result_lambda = st.lambda;
    return step;
}

InductionStep induction_step(const Permutation& pi, const std::vector<Scalar>& lambda) {
    RauzyState st = RauzyState::start(pi, lambda);
    return advance(st);
}

InductionTrace::InductionTrace(Permutation pi, std::vector<Scalar> lambda)
    : pi0_(std::move(pi)),
      lambda0_(std::move(lambda)),
      cumulative_(IntMatrix::identity(pi0_.size())),
      state_(RauzyState::start(pi0_, lambda0_)) {}

void InductionTrace::extend(std::int64_t k) {
    for (std::int64_t i = 0; i < k; ++i) {
        InductionStep s = [&] {
            try {
                return advance(state_);
            } catch (const KeaneViolation& e) {
                throw KeaneViolationWithTrace(e.what(), n() + 1, *this);
            }
        }();
        // Right-multiplying by I + E_{w,l} adds column w to column l.
        for (int r = 0; r < cumulative_.size(); ++r) cumulative_(r, s.loser) += cumulative_(r, s.winner);
        steps_.push_back(std::move(s));
    }
}

InductionTrace induct(const Permutation& pi, const std::vector<Scalar>& lambda, std::int64_t n) {
    if (n < 0) throw InvalidInput("step count must be >= 0");
    InductionTrace t(pi, lambda);
    t.extend(n);
    return t;
}

std::pair<Permutation, std::vector<Scalar>> normalized_step(const Permutation& pi,
                                                            const std::vector<Scalar>& lambda) {
    RauzyState st = RauzyState::start(pi, lambda);
    advance(st);
    return {st.pi(), normalized(st.lambda_domain())};
}

std::pair<std::int64_t, InductionTrace> find_positive_return(const Permutation& pi,
                                                             const std::vector<Scalar>& lambda,
                                                             std::int64_t max_steps) {
    InductionTrace t(pi, lambda);
    while (t.n() < max_steps) {
        t.extend(1);
        if (t.pi_n() == pi && t.cumulative().strictly_positive()) return {t.n(), std::move(t)};
    }
    throw NotFound("no positive return within " + std::to_string(max_steps) + " steps", max_steps);
}

Permutation rauzy_move(const Permutation& pi, StepKind kind) {
    std::vector<Scalar> dummy(static_cast<std::size_t>(pi.size()), Scalar(1));
    RauzyState st = RauzyState::start(pi, dummy);
    const int a = st.top.back();
    const int b = st.bottom.back();
    if (kind == StepKind::Bottom) {
        move_after(st.bottom, b, a);
    } else {
        move_after(st.top, a, b);
    }
    return st.pi();
}

std::vector<Permutation> rauzy_class(const Permutation& pi) {
    if (!is_irreducible(pi)) throw InvalidInput("permutation " + pi.str() + " is reducible");
    std::set<Permutation> seen{pi};
    std::deque<Permutation> queue{pi};
    while (!queue.empty()) {
        Permutation p = queue.front();
        queue.pop_front();
        for (StepKind k : {StepKind::Top, StepKind::Bottom}) {
            Permutation q = rauzy_move(p, k);
            if (seen.insert(q).second) queue.push_back(q);
        }
    }
    return {seen.begin(), seen.end()};
}

std::vector<std::int64_t> recurrence_search(const Permutation& pi, const std::vector<Scalar>& lambda,
                                            const RecurrencePredicate& pred, std::int64_t max_steps,
                                            std::size_t max_hits) {
    std::vector<std::int64_t> hits;
    RauzyState st = RauzyState::start(pi, lambda);
    for (std::int64_t r = 1; r <= max_steps && hits.size() < max_hits; ++r) {
        try {
            advance(st);
        } catch (const KeaneViolation& e) {
            throw KeaneViolation(e.what(), r);
        }
        if (pred(st.pi(), normalized(st.lambda_domain()))) hits.push_back(r);
    }
    return hits;
}

}  // namespace ietflow

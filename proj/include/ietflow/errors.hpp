#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ietflow {

/// Base of every error raised by the library. `kind()` is a stable
/// machine-readable tag used by the CLI's error JSON.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

class InvalidInput : public Error {
public:
    explicit InvalidInput(const std::string& what) : Error("InvalidInput", what) {}
};

class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error("DomainError", what) {}
};

class FieldMismatch : public Error {
public:
    explicit FieldMismatch(const std::string& what) : Error("FieldMismatch", what) {}
};

class NotFound : public Error {
public:
    NotFound(const std::string& what, std::int64_t max_steps)
        : Error("NotFound", what), max_steps_(max_steps) {}
    std::int64_t max_steps() const noexcept { return max_steps_; }

private:
    std::int64_t max_steps_;
};

class BudgetExhausted : public Error {
public:
    explicit BudgetExhausted(const std::string& what) : Error("BudgetExhausted", what) {}
};

class ParameterInfeasible : public Error {
public:
    explicit ParameterInfeasible(const std::string& what)
        : Error("ParameterInfeasible", what) {}
};

class NoSuitablePermutation : public Error {
public:
    explicit NoSuitablePermutation(const std::string& what)
        : Error("NoSuitablePermutation", what) {}
};

class NonPositiveEntry : public Error {
public:
    explicit NonPositiveEntry(const std::string& what) : Error("NonPositiveEntry", what) {}
};

class NotAtomic : public Error {
public:
    explicit NotAtomic(const std::string& what) : Error("NotAtomic", what) {}
};

class RefinementExplosion : public Error {
public:
    RefinementExplosion(const std::string& what, std::size_t budget)
        : Error("RefinementExplosion", what), budget_(budget) {}
    std::size_t budget() const noexcept { return budget_; }

private:
    std::size_t budget_;
};

class KeaneViolation : public Error {
public:
    KeaneViolation(const std::string& what, std::int64_t at_step)
        : Error("KeaneViolation", what), at_step_(at_step) {}
    /// 1-based index of the induction step that hit a length tie.
    std::int64_t at_step() const noexcept { return at_step_; }

private:
    std::int64_t at_step_;
};

class NotCaptured : public Error {
public:
    NotCaptured(const std::string& what, int l) : Error("NotCaptured", what), l_(l) {}
    /// 1-based index of the first discontinuity outside its subtower.
    int index() const noexcept { return l_; }

private:
    int l_;
};

class CaseUnsupported : public Error {
public:
    explicit CaseUnsupported(const std::string& what) : Error("CaseUnsupported", what) {}
};

}  // namespace ietflow

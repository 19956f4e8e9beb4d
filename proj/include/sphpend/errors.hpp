#pragma once

#include <stdexcept>
#include <string>

namespace sphpend {

/// Whether a failure is the caller's fault (bad input / region) or a numerical one.
/// The CLI maps these onto exit codes 2 and 3.
enum class ErrorCategory { InvalidInput, Numerical };

class Error : public std::runtime_error
{
public:
    Error(ErrorCategory category, const std::string& what)
        : std::runtime_error(what), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

#define SPHPEND_DEFINE_ERROR(Name, Category)                                  \
    class Name : public Error                                                  \
    {                                                                          \
    public:                                                                    \
        explicit Name(const std::string& what)                                 \
            : Error(ErrorCategory::Category, #Name ": " + what) {}            \
    };

SPHPEND_DEFINE_ERROR(NotInRange, InvalidInput)
SPHPEND_DEFINE_ERROR(DomainError, InvalidInput)
SPHPEND_DEFINE_ERROR(BranchCut, InvalidInput)
SPHPEND_DEFINE_ERROR(LoopInvalid, InvalidInput)
SPHPEND_DEFINE_ERROR(MissingPoint, InvalidInput)
SPHPEND_DEFINE_ERROR(PinchCollision, InvalidInput)
SPHPEND_DEFINE_ERROR(ConvergenceError, Numerical)
SPHPEND_DEFINE_ERROR(QuadratureError, Numerical)
SPHPEND_DEFINE_ERROR(RefinementLimit, Numerical)
SPHPEND_DEFINE_ERROR(StepError, Numerical)
SPHPEND_DEFINE_ERROR(EventError, Numerical)
SPHPEND_DEFINE_ERROR(LatticeAmbiguous, Numerical)

#undef SPHPEND_DEFINE_ERROR

} // namespace sphpend

#pragma once
// Error taxonomy. Validation errors are bad inputs/configuration; numerical
// guards fire when a computation refuses to continue (unresolved tails,
// near-singular transforms, diverging iterations). The CLI maps validation
// to exit 2 and numerical guards to exit 3.

#include <stdexcept>
#include <string>

namespace tflab {

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainError : ValidationError { using ValidationError::ValidationError; };
struct BranchError : ValidationError { using ValidationError::ValidationError; };
struct OrderError : ValidationError { using ValidationError::ValidationError; };
struct GridMismatch : ValidationError { using ValidationError::ValidationError; };
struct NoAdmissibleP : ValidationError { using ValidationError::ValidationError; };

struct EvalError : NumericalError { using NumericalError::NumericalError; };
struct TailError : NumericalError { using NumericalError::NumericalError; };
struct DegenerateState : NumericalError { using NumericalError::NumericalError; };
struct IllConditioned : NumericalError { using NumericalError::NumericalError; };
struct IntegrabilityError : NumericalError { using NumericalError::NumericalError; };
struct EigFailure : NumericalError { using NumericalError::NumericalError; };
struct LinAlgError : NumericalError { using NumericalError::NumericalError; };
struct StepError : NumericalError { using NumericalError::NumericalError; };
struct NoContraction : NumericalError { using NumericalError::NumericalError; };
struct IncompleteTrajectory : NumericalError { using NumericalError::NumericalError; };
struct MonotonicityError : NumericalError { using NumericalError::NumericalError; };
struct CoverageError : NumericalError { using NumericalError::NumericalError; };

} // namespace tflab

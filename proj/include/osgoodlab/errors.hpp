#ifndef OSGOODLAB_ERRORS_HPP
#define OSGOODLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace osgoodlab {

/// Invalid argument or violated precondition.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A function was evaluated (or would be) outside the set where it is defined.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Query outside a tabulated range.
class RangeError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Malformed data, e.g. a non-symmetric diffusion matrix.
class StructuralError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Quadrature or ODE failure, failed fits. Carries a diagnostic string.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A mode amplitude or weight left the double range. Experiments abort on it.
class OverflowAbort : public NumericalError {
public:
    using NumericalError::NumericalError;
};

} // namespace osgoodlab

#endif // OSGOODLAB_ERRORS_HPP

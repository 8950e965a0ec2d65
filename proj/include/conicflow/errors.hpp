#ifndef CONICFLOW_ERRORS_HPP
#define CONICFLOW_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace conicflow {

// Point or parameter outside a chart / operation domain.  Maps to CLI exit code 2.
struct DomainError : std::domain_error {
    explicit DomainError(const std::string& msg) : std::domain_error(msg) {}
};

// Conditioning or floating-point trouble detected during evaluation.  Exit code 3.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// An iterative method (Newton, shooting, Krylov, step control) failed to converge.
// Exit code 3.
struct NonConvergence : std::runtime_error {
    explicit NonConvergence(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace conicflow

#endif

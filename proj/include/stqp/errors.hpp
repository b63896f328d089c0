#pragma once

#include <stdexcept>
#include <string>

namespace stqp {

/// Precondition violated by the caller (bad argument, out-of-range size).
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// The requested functional is not defined for this distribution family.
class UnsupportedFamily : public DomainError {
public:
    explicit UnsupportedFamily(const std::string& what) : DomainError(what) {}
};

/// Instance violates the continuity assumption (e.g. tied diagonal entries).
class DegenerateInstance : public DomainError {
public:
    explicit DegenerateInstance(const std::string& what) : DomainError(what) {}
};

/// Work would exceed the configured size limit.
class CostGuard : public DomainError {
public:
    explicit CostGuard(const std::string& what) : DomainError(what) {}
};

/// A computation that should succeed did not (no candidate, quadrature
/// nonconvergence, ...).
class NumericalFailure : public std::runtime_error {
public:
    explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace stqp

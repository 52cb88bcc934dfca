#pragma once

#include <stdexcept>
#include <string>

namespace otoc {

/// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class SingularMatrix : public Error {
public:
    using Error::Error;
};

/// A monomial with alpha != beta carries angle dependence and cannot be
/// expressed in the action variables.
class NonResonantMonomial : public Error {
public:
    using Error::Error;
};

/// A converted action coefficient kept an imaginary part above tolerance.
class ComplexResidue : public Error {
public:
    using Error::Error;
};

class InfOverflow : public Error {
public:
    using Error::Error;
};

/// Zero-period (or zero-rate) orbit: stability factors diverge.
class DegenerateOrbit : public Error {
public:
    using Error::Error;
};

class SingularJacobian : public Error {
public:
    using Error::Error;
};

class DegenerateHessian : public Error {
public:
    using Error::Error;
};

/// Root search exhausted every start without converging.
class NoRoot : public Error {
public:
    using Error::Error;
};

class BelowSaddle : public Error {
public:
    using Error::Error;
};

class ModeMismatch : public Error {
public:
    using Error::Error;
};

class QuadratureNotConverged : public Error {
public:
    using Error::Error;
};

class IntegratorDiverged : public Error {
public:
    using Error::Error;
};

class GridTooSmall : public Error {
public:
    using Error::Error;
};

class DepthOutOfRange : public Error {
public:
    using Error::Error;
};

class InsufficientData : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

} // namespace otoc

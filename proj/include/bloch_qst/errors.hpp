#pragma once

#include <stdexcept>
#include <string>

namespace bloch_qst {

/// Base for every error raised by the library. Callers that only care about
/// "did the physics run" can catch this one type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid chain geometry or physics parameters.
class ChainError : public Error {
public:
    using Error::Error;
};

/// A tilt-derived quantity (Bloch period, gamma) was requested with F = 0.
class UntiltedChainError : public Error {
public:
    using Error::Error;
};

/// Site, window or support lies outside the chain.
class RangeError : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// Argument outside the validated accuracy window of a special function.
class DomainError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    using Error::Error;
};

class NormError : public Error {
public:
    using Error::Error;
};

}  // namespace bloch_qst

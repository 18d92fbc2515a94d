#pragma once

#include <stdexcept>
#include <string>

namespace dlocal
{
    /// Base class of every error raised by the library.
    class Error : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    /// Input that violates a type invariant (self-loops, out-of-range IDs, bad file syntax).
    class MalformedInput : public Error
    {
    public:
        using Error::Error;
    };

    /// An operation was called outside its documented precondition.
    class PreconditionError : public Error
    {
    public:
        using Error::Error;
    };

    /// A generator was asked for parameters it cannot realize.
    class GeneratorError : public Error
    {
    public:
        using Error::Error;
    };

    /// A local computation touched state outside its declared view.
    class ContractViolation : public Error
    {
    public:
        using Error::Error;
    };

    /// An exact oracle or enumeration exceeded its configured cap.
    class CapacityError : public Error
    {
    public:
        using Error::Error;
    };

    /// The derandomizer was handed an algorithm without a flag/checker structure.
    class NotLocallyCheckable : public Error
    {
    public:
        using Error::Error;
    };

    /// A runtime-asserted guarantee did not hold.
    class PostconditionViolation : public Error
    {
    public:
        using Error::Error;
    };

    /// Iteration or step budget exhausted.
    class BudgetExceeded : public Error
    {
    public:
        using Error::Error;
    };

    class BootstrapInfeasible : public Error
    {
    public:
        using Error::Error;
    };

    class ConfigError : public Error
    {
    public:
        using Error::Error;
    };

} // namespace dlocal

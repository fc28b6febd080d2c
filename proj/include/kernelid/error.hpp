#pragma once

#include <stdexcept>
#include <string>

namespace kernelid {

// Usage and validation errors. The CLI maps these to exit status 1.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A computed result contradicts a theorem the library relies on. This is a
// numerical bug, never a property of the input; the CLI maps it to exit 2.
class InternalAssertion : public std::runtime_error {
public:
    explicit InternalAssertion(const std::string& what) : std::runtime_error(what) {}
};

#define KERNELID_DEFINE_ERROR(Name, Base)                              \
    class Name : public Base {                                         \
    public:                                                            \
        explicit Name(const std::string& what) : Base(#Name ": " + what) {} \
    };

KERNELID_DEFINE_ERROR(DomainMismatch, Error)
KERNELID_DEFINE_ERROR(NonFiniteEntry, Error)
KERNELID_DEFINE_ERROR(IndefiniteGram, Error)
KERNELID_DEFINE_ERROR(InvalidArgument, Error)
KERNELID_DEFINE_ERROR(ParameterOutOfRange, Error)
KERNELID_DEFINE_ERROR(NotStationary, Error)
KERNELID_DEFINE_ERROR(UnstableRealization, Error)
KERNELID_DEFINE_ERROR(QuadratureFailure, Error)
KERNELID_DEFINE_ERROR(ImproperSampling, Error)
KERNELID_DEFINE_ERROR(NotIncreasing, Error)
KERNELID_DEFINE_ERROR(NegativeCoefficient, Error)
KERNELID_DEFINE_ERROR(EnvelopeRejected, Error)
KERNELID_DEFINE_ERROR(NegativeDelta, Error)
KERNELID_DEFINE_ERROR(OutOfRange, Error)
KERNELID_DEFINE_ERROR(CholeskyFailure, Error)
KERNELID_DEFINE_ERROR(FrequencyOutOfRange, Error)
KERNELID_DEFINE_ERROR(SpecParseError, Error)
KERNELID_DEFINE_ERROR(UnknownFamily, Error)

KERNELID_DEFINE_ERROR(ChainViolation, InternalAssertion)
KERNELID_DEFINE_ERROR(BoundViolated, InternalAssertion)

#undef KERNELID_DEFINE_ERROR

// Raised by check_dominance; carries the point where domination failed.
class NotDominated : public Error {
public:
    NotDominated(double s, double t, const std::string& what)
        : Error("NotDominated: " + what), s_(s), t_(t) {}
    double witness_s() const { return s_; }
    double witness_t() const { return t_; }

private:
    double s_;
    double t_;
};

}  // namespace kernelid

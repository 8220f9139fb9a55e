#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "wfsim/types.hpp"

namespace wfsim {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed document (not parseable at all).
class SyntaxError : public Error {
public:
    using Error::Error;
};

/// Well-formed document that violates a schema or model invariant.
/// `subject()` names the offending step id or field path.
class ValidationError : public Error {
public:
    ValidationError(std::string subject, const std::string& what)
        : Error(subject.empty() ? what : subject + ": " + what), subject_(std::move(subject)) {}

    const std::string& subject() const noexcept { return subject_; }

private:
    std::string subject_;
};

class NegativeDelay : public Error {
public:
    using Error::Error;
};

/// An event handler threw; carries the offending event's identity.
class HandlerFailure : public Error {
public:
    HandlerFailure(std::uint64_t seq, Seconds time, const std::string& what)
        : Error("event #" + std::to_string(seq) + " at t=" + std::to_string(time) + ": " + what),
          seq_(seq),
          time_(time) {}

    std::uint64_t seq() const noexcept { return seq_; }
    Seconds time() const noexcept { return time_; }

private:
    std::uint64_t seq_;
    Seconds time_;
};

class RequestExceedsLargestNode : public Error {
public:
    using Error::Error;
};

class DoubleRelease : public Error {
public:
    using Error::Error;
};

class InconsistentState : public Error {
public:
    using Error::Error;
};

class UnknownStep : public Error {
public:
    using Error::Error;
};

class DuplicateCompletion : public Error {
public:
    using Error::Error;
};

class EmptyBatch : public Error {
public:
    using Error::Error;
};

class TooFewBatches : public Error {
public:
    using Error::Error;
};

class WindowTooShort : public Error {
public:
    using Error::Error;
};

/// An analysis was asked for on data that does not meet its precondition.
class PreconditionViolated : public Error {
public:
    using Error::Error;
};

}  // namespace wfsim

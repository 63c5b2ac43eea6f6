#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace affectfuse {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A string does not name a label of the expected space.
struct UnknownLabelError : Error {
    using Error::Error;
};

/// A confidence or probability vector is negative or does not sum to 1.
struct BadDistributionError : Error {
    using Error::Error;
};

/// The missing-cue policy requires more cues than the window provides.
struct InsufficientCuesError : Error {
    using Error::Error;
};

/// An observation stream violated the sorted-by-timestamp precondition.
struct UnsortedInputError : Error {
    UnsortedInputError(std::size_t index, const std::string& what)
        : Error(what), index(index) {}
    std::size_t index;  // offending position in the input sequence
};

/// Two confusion matrices with different label spaces were combined.
struct SpaceMismatchError : Error {
    using Error::Error;
};

/// A summary was requested from a matrix with no recorded events.
struct EmptyMatrixError : Error {
    using Error::Error;
};

/// A configuration file or value is invalid.
struct ConfigError : Error {
    using Error::Error;
};

/// A malformed line in a JSONL input stream.
struct InputFormatError : Error {
    InputFormatError(std::size_t line, const std::string& what)
        : Error(what), line(line) {}
    std::size_t line;  // 1-based line number
};

}  // namespace affectfuse

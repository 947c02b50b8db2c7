#pragma once

#include <stdexcept>
#include <string>

namespace grc {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A geometric transform would produce an image with a zero-sized dimension.
class DegenerateOutputError : public Error {
public:
    explicit DegenerateOutputError(const std::string& what) : Error(what) {}
};

/// The generator backend could not be reached after the configured retries.
class BackendUnavailableError : public Error {
public:
    explicit BackendUnavailableError(const std::string& what) : Error(what) {}
};

/// The generator backend answered but violated the wire contract.
class MalformedReplyError : public Error {
public:
    explicit MalformedReplyError(const std::string& what) : Error(what) {}
};

/// Requested strictness index is not part of the configured family.
class UnknownOperatingPointError : public Error {
public:
    explicit UnknownOperatingPointError(const std::string& what) : Error(what) {}
};

/// Metric requested over an empty record set.
class EmptyRecordSetError : public Error {
public:
    explicit EmptyRecordSetError(const std::string& what) : Error(what) {}
};

/// Conditional risk requested but no record was covered.
class NoCoveredRecordsError : public Error {
public:
    explicit NoCoveredRecordsError(const std::string& what) : Error(what) {}
};

/// Ground truth canonicalizes to the empty string.
class EmptyGroundTruthError : public Error {
public:
    explicit EmptyGroundTruthError(const std::string& what) : Error(what) {}
};

/// The backend provides no mean token log-probability.
class NoConfidenceSignalError : public Error {
public:
    explicit NoConfidenceSignalError(const std::string& what) : Error(what) {}
};

/// Manifest, config or image file could not be parsed.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& what) : Error(what) {}
};

}  // namespace grc

#ifndef SENSEBRIDGE_ERROR_HPP
#define SENSEBRIDGE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace sensebridge {

// Malformed input that could not be read at all (wrong column count, bad UTF-8 framing).
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// Well-formed input that violates a data invariant (unknown period, dangling sense reference).
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Writing a record that cannot be represented in the output format.
class SerializationError : public std::runtime_error {
public:
    explicit SerializationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad arguments or state for an operation (uninitialized scorer, empty grid, ...).
class UsageError : public std::runtime_error {
public:
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

// HTTP-level failure that persisted through retries.
class TransportError : public std::runtime_error {
public:
    explicit TransportError(const std::string& msg) : std::runtime_error(msg) {}
};

// A page was fetched but its structure could not be interpreted.
class ExtractionError : public std::runtime_error {
public:
    explicit ExtractionError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace sensebridge

#endif

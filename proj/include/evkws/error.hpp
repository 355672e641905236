#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace evkws {

// Base of every error raised by the library. The CLI maps each subclass to a
// distinct exit code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char* kind() const noexcept { return "error"; }
};

class IoError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "io"; }
};

// Malformed input. `offset` is a byte offset for binary input and a 1-based
// line number for text input.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::uint64_t offset)
        : Error(what), offset_(offset) {}
    std::uint64_t offset() const noexcept { return offset_; }
    const char* kind() const noexcept override { return "parse"; }

private:
    std::uint64_t offset_;
};

class ValidationError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "validation"; }
};

class OrderingError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "ordering"; }
};

class ConfigError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "config"; }
};

class OverflowError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "overflow"; }
};

}  // namespace evkws

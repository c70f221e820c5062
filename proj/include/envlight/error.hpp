// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace envlight {

enum class ErrorKind {
    Usage,      // bad command line / argument combination
    Parse,      // malformed input file
    Io,         // filesystem failure
    Invariant,  // a domain invariant or precondition was violated
};

/// Base error for everything the library throws on purpose. The kind decides
/// the process exit code in the CLI.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Structured parse failure. `offset` is the byte position in the input at
/// which decoding gave up.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t offset)
        : Error(ErrorKind::Parse, message + " (at byte " + std::to_string(offset) + ")"),
          offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

class IoError : public Error {
public:
    explicit IoError(const std::string& message) : Error(ErrorKind::Io, message) {}
};

class InvariantError : public Error {
public:
    explicit InvariantError(const std::string& message) : Error(ErrorKind::Invariant, message) {}
};

class UsageError : public Error {
public:
    explicit UsageError(const std::string& message) : Error(ErrorKind::Usage, message) {}
};

const char* to_string(ErrorKind kind) noexcept;

}  // namespace envlight

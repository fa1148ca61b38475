#pragma once

#include <stdexcept>
#include <string>

namespace hreye {

// Every failure raised by the library derives from Error so callers can
// catch the family or a specific kind.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class AddressError : public Error { using Error::Error; };
class DomainError : public Error { using Error::Error; };
class ConfigError : public Error { using Error::Error; };
class DataError : public Error { using Error::Error; };
class EstimationError : public Error { using Error::Error; };
class TransportError : public Error { using Error::Error; };
class NotFoundError : public Error { using Error::Error; };

// Wire-level decode failures.
class TruncationError : public Error { using Error::Error; };
class FormatError : public Error { using Error::Error; };
class CorruptionError : public Error { using Error::Error; };

class ParseError : public Error {
public:
    ParseError(int line, const std::string& cause)
        : Error("line " + std::to_string(line) + ": " + cause), line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

}  // namespace hreye

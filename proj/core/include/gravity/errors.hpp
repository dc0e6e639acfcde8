#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace gravity {

// Every failure carries a stable, single-token code. The CLI prints
// "<code>: <message>" as one line on stderr so scripts can grep for the code
// without parsing prose. Messages never contain newlines.
//
// Codes in use:
//   E_IO        file cannot be opened / written
//   E_PARSE     malformed file content (always prefixed with file:line)
//   E_SCHEMA    header is missing a required column
//   E_REF       record references an unknown country / missing macro entry
//   E_VALUE     field value violates an invariant (negative flow, bad share, ...)
//   E_RANGE     coordinate or year outside its legal range
//   E_DOMAIN    bad arguments to an in-memory operation
//   E_RANK      design matrix is rank deficient (names the columns)
//   E_SEPARATION IRLS weights collapse so coefficients diverge
//   E_CONVERGE  IRLS ran out of iterations (message carries the trace tail)
//   E_USAGE     bad command line (CLI only, exit code 2)
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

// Malformed input file; location is baked into the message as "file:line".
class ParseError : public Error {
public:
    ParseError(const std::string& file, long line, const std::string& message)
        : Error("E_PARSE", file + ":" + std::to_string(line) + ": " + message) {}

    // Schema-level problems have a header location but a distinct code.
    static ParseError schema(const std::string& file, const std::string& message) {
        return ParseError(Tag{}, "E_SCHEMA", file + ": " + message);
    }

private:
    struct Tag {};
    ParseError(Tag, std::string code, const std::string& message)
        : Error(std::move(code), message) {}
};

// Structurally valid input that breaks a dataset invariant. The message names
// the offending record.
class ValidationError : public Error {
public:
    ValidationError(std::string code, const std::string& message)
        : Error(std::move(code), message) {}
};

// Bad arguments to an in-memory operation (empty input, year outside
// coverage, forbidden option combination, ...).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& message) : Error("E_DOMAIN", message) {}
};

// Estimation-stage failures: rank deficiency, separation, non-convergence.
class EstimationError : public Error {
public:
    EstimationError(std::string code, const std::string& message)
        : Error(std::move(code), message) {}
};

} // namespace gravity

#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace logwitness {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input text (word grammar, matrix/group files, flags).
class ParseError : public Error {
public:
    using Error::Error;
};

// The equation reduced to the empty word of the free product.
class TrivialWordError : public ParseError {
public:
    using ParseError::ParseError;
};

// Structural validation failed (bad determinant, inconsistent table, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

// A configured cap (ball size, element count, entry bits) was exceeded.
class ResourceError : public Error {
public:
    using Error::Error;
};

// The prime interval (C0*n, C0*n^2] contains no prime at all.
class EmptyWindowError : public Error {
public:
    using Error::Error;
};

// Per-prime reason a candidate was rejected during good-prime search.
struct PrimeDiagnostic {
    std::uint64_t p = 0;
    std::string failed_clause;   // "central_constant" | "generation" | "no_witness" | ...
    int constant_index = -1;     // set for central_constant
};

// Every prime of every attempted window failed; carries the reasons.
class WindowExhaustedError : public Error {
public:
    WindowExhaustedError(const std::string& what, std::vector<PrimeDiagnostic> diags)
        : Error(what), diagnostics(std::move(diags)) {}
    std::vector<PrimeDiagnostic> diagnostics;
};

// An operation that needs a fully closed Cayley ball got a partial one.
class PartialBallError : public Error {
public:
    using Error::Error;
};

class NotFoundError : public Error {
public:
    using Error::Error;
};

}  // namespace logwitness

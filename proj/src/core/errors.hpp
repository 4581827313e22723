#pragma once

#include <stdexcept>
#include <string>

namespace imsprep {

// Error categories, mirrored 1:1 by the C API status codes and the CLI
// exit-code mapping (contract/format -> 1, io -> 2).
enum class ErrorCode {
    contract = 1,
    io = 2,
    format = 3,
    numeric = 4,
    model = 5,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

// Violated precondition or malformed argument.
struct ContractError : Error {
    explicit ContractError(const std::string& what) : Error(ErrorCode::contract, what) {}
};

// Filesystem-level failure (open/read/write).
struct IoError : Error {
    explicit IoError(const std::string& what) : Error(ErrorCode::io, what) {}
};

// Syntactically broken input file.
struct FormatError : Error {
    explicit FormatError(const std::string& what) : Error(ErrorCode::format, what) {}
};

// NaN/Inf or other floating-point breakdown inside an algorithm.
struct NumericError : Error {
    explicit NumericError(const std::string& what) : Error(ErrorCode::numeric, what) {}
};

// Input is structurally valid but the statistical model cannot be applied
// (for example no signal-like cells to initialize from).
struct ModelError : Error {
    explicit ModelError(const std::string& what) : Error(ErrorCode::model, what) {}
};

}  // namespace imsprep

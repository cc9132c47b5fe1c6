// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The typeswap Authors

#pragma once

#include <stdexcept>
#include <string>

namespace typeswap {

enum class ErrorKind {
    Parse,
    Validation,
    Reference,
    StaleAnnotation,
    Io,
    Convergence,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

// Process exit status for the CLI: 1 validation, 2 runtime, 3 I/O.
inline int exit_code_for(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::Parse:
    case ErrorKind::Validation:
    case ErrorKind::Reference:
    case ErrorKind::StaleAnnotation:
        return 1;
    case ErrorKind::Io:
        return 3;
    case ErrorKind::Convergence:
        return 2;
    }
    return 2;
}

} // namespace typeswap

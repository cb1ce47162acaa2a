// SPDX-License-Identifier: Apache-2.0
//
// Exception hierarchy used throughout the library.  Every failure mode is
// reported through one of these types so that the C API can translate them
// into stable status codes.

#pragma once

#include <stdexcept>
#include <string>

namespace ghostsim {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A parameter is outside its documented domain (bad size, bad range, ...).
class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& what) : Error(what) {}
};

/// Two objects that must agree in shape (pixel count, measurement count,
/// pitch) do not.
class DimensionMismatch : public Error {
public:
    explicit DimensionMismatch(const std::string& what) : Error(what) {}
};

/// A computation failed numerically (degenerate ensemble, diverging
/// iteration, singular system beyond the ridge fallback).
class NumericError : public Error {
public:
    explicit NumericError(const std::string& what) : Error(what) {}
};

/// File input/output failed.
class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(what) {}
};

} // namespace ghostsim

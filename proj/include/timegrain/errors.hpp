// Copyright (c) 2026 the timegrain authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace timegrain {

// Error taxonomy for the whole library. Each class maps 1:1 onto a
// tg_status code in the C API, so new subclasses need a new code there.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A value outside an operation's domain (negative timestamp, k out of range).
class ArgumentError : public Error {
public:
    using Error::Error;
};

// Incompatible matrix/vector dimensions.
class ShapeError : public Error {
public:
    using Error::Error;
};

// Malformed text: token grammar, JSON, numbers.
class ParseError : public Error {
public:
    using Error::Error;
};

// Bad configuration: unknown keys, invalid values, missing vocabulary rows.
class ConfigError : public Error {
public:
    using Error::Error;
};

// A structurally well-formed record violating a record-level invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Batch-level input problems: duplicate ids, misaligned files, task mismatch.
class InputError : public Error {
public:
    using Error::Error;
};

// Filesystem failures.
class IoError : public Error {
public:
    using Error::Error;
};

// A FeatureExtractor implementation broke its contract.
class ExtractorError : public Error {
public:
    using Error::Error;
};

} // namespace timegrain

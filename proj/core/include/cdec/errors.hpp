#pragma once

#include <stdexcept>
#include <string>

namespace cdec {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Incompatible matrix/tensor shapes. Message names both shapes.
class DimensionError : public Error {
public:
    using Error::Error;
};

// Caller passed an invalid value (empty label list, k out of range, ...).
class ArgumentError : public Error {
public:
    using Error::Error;
};

// Prompt template does not contain exactly one {labels} placeholder.
class TemplateError : public Error {
public:
    using Error::Error;
};

// Invalid configuration (weights, synth parameters, config files).
class ConfigError : public Error {
public:
    using Error::Error;
};

// A public operation produced a non-finite value.
class NumericError : public Error {
public:
    using Error::Error;
};

// A tape node id was used with a tape that did not produce it.
class LineageError : public Error {
public:
    using Error::Error;
};

// Container file errors, one subclass per failure mode.
class IoError : public Error {
public:
    using Error::Error;
};

class MagicError : public IoError {
public:
    using IoError::IoError;
};

class TruncatedError : public IoError {
public:
    using IoError::IoError;
};

class ChecksumError : public IoError {
public:
    using IoError::IoError;
};

class ConsistencyError : public IoError {
public:
    using IoError::IoError;
};

// ZSL/GZSL contract violations (unseen label in training data, ...).
class ProtocolError : public Error {
public:
    using Error::Error;
};

// Metric evaluation impossible (e.g. every class excluded from mAP).
class EvaluationError : public Error {
public:
    using Error::Error;
};

}  // namespace cdec

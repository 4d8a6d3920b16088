#pragma once

#include <stdexcept>
#include <string>

namespace hdrtv {

// Base class for everything this library throws.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Tensor or frame dimensions are incompatible with the requested operation.
struct ShapeError : Error {
    using Error::Error;
};

// A frame carries the wrong colorimetry tag (gamut/transfer) for the
// requested operation. Mixing representations is a hard error, never a
// silent pass.
struct StateError : Error {
    using Error::Error;
};

// An out-of-range configuration value (mask thresholds, block counts, ...).
struct ConfigError : Error {
    using Error::Error;
};

// A file could not be read or written.
struct IoError : Error {
    using Error::Error;
};

// The file exists and parses, but is not a format this library accepts.
struct UnsupportedFormat : IoError {
    using IoError::IoError;
};

// The weights container failed structural or checksum validation.
struct CorruptWeights : IoError {
    using IoError::IoError;
};

// A forward pass asked the weight store for a tensor it does not hold.
struct MissingWeightError : Error {
    explicit MissingWeightError(const std::string& name)
        : Error("missing weight tensor: " + name), tensor_name(name) {}
    std::string tensor_name;
};

} // namespace hdrtv

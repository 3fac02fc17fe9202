#pragma once

#include <stdexcept>
#include <string>

namespace pedcross {

// Base for all library errors. The CLI maps these onto its exit-code
// contract: ConfigError/IoError/SerializationError -> 2, everything else -> 1.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid configuration value; the message names the offending field.
struct ConfigError : Error {
    using Error::Error;
};

// File not found, unreadable, malformed container format.
struct IoError : Error {
    using Error::Error;
};

// A value could not be encoded (e.g. unseen category at transform time).
struct EncodingError : Error {
    using Error::Error;
};

// Dimension or column-metadata mismatch between two matrices/models.
struct ShapeError : Error {
    using Error::Error;
};

// Training produced a non-finite loss or was handed unusable data.
struct TrainingError : Error {
    using Error::Error;
};

// Model file corrupt or from an unsupported format version.
struct SerializationError : Error {
    using Error::Error;
};

}  // namespace pedcross

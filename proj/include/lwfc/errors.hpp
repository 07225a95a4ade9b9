#pragma once

#include <stdexcept>
#include <string>

namespace lwfc {

// Bad arguments or configurations detected before any work is done.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Malformed container structure: wrong magic, unsupported version,
// invalid header fields.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Structurally valid container whose contents fail validation:
// truncated payload, trailing garbage, inconsistent counts.
class CorruptStreamError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Numeric payloads that violate data invariants (NaN/Inf activations).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Filesystem failures: open/read/write.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace lwfc

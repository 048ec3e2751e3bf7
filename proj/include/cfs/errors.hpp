#pragma once

#include <stdexcept>
#include <string>

namespace cfs {

// Bad input data: unreadable or ragged CSV, non-numeric cells, dimension mismatches.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or truncated knowledge-base / scenario file.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class VersionMismatch : public FormatError {
public:
    VersionMismatch(int found, int expected)
        : FormatError("unsupported format version " + std::to_string(found) + " (expected " +
                      std::to_string(expected) + ")"),
          found_(found) {}

    int found() const { return found_; }

private:
    int found_;
};

// Precondition violations and invalid parameters use std::invalid_argument.

}  // namespace cfs

#pragma once

#include <stdexcept>
#include <string>

namespace waveformer {

// Malformed file contents (bad magic, truncation, unsupported encoding).
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

// Could not open / read / write a file at all.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Well-formed file whose contents disagree with the model architecture.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace waveformer

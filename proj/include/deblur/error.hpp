#pragma once

#include <stdexcept>
#include <string>

namespace deblur {

enum class ErrorKind {
    Dimension,          // kernel/image size mismatch
    Channel,            // wrong channel count
    Scale,              // resampled output too small
    Index,              // patch footprint outside the image
    Shape,              // inconsistent matrix/patch layout
    TrainingData,       // not enough samples for the dictionary
    DegenerateData,     // all-zero training samples
    Count,              // more neighbors requested than patches exist
    Parameter,          // invalid scalar parameter
    DegenerateGradient, // kernel update has no gradient signal
    Io,                 // unreadable file
    Format,             // malformed file contents
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what);

    ErrorKind kind() const noexcept { return kind_; }
    // Message without the kind prefix.
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorKind kind_;
    std::string detail_;
};

}  // namespace deblur

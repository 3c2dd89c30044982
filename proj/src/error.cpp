#include "deblur/error.hpp"

namespace deblur {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Dimension: return "dimension error";
        case ErrorKind::Channel: return "channel error";
        case ErrorKind::Scale: return "scale error";
        case ErrorKind::Index: return "index error";
        case ErrorKind::Shape: return "shape error";
        case ErrorKind::TrainingData: return "training-data error";
        case ErrorKind::DegenerateData: return "degenerate-data error";
        case ErrorKind::Count: return "count error";
        case ErrorKind::Parameter: return "parameter error";
        case ErrorKind::DegenerateGradient: return "degenerate-gradient error";
        case ErrorKind::Io: return "io error";
        case ErrorKind::Format: return "format error";
    }
    return "error";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), detail_(what) {}

}  // namespace deblur

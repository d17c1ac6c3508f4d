#pragma once

#include <stdexcept>
#include <string>

namespace idf {

// Validation failures (bad config, malformed input files) map to exit code 2,
// everything else that throws maps to exit code 1.
struct SchemaError : std::runtime_error {
    explicit SchemaError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

struct SegmentationFailed : std::runtime_error {
    explicit SegmentationFailed(const std::string& msg) : std::runtime_error(msg) {}
};

struct NoComparableBits : std::runtime_error {
    explicit NoComparableBits(const std::string& msg) : std::runtime_error(msg) {}
};

struct UndefinedCrr : std::runtime_error {
    explicit UndefinedCrr(const std::string& msg) : std::runtime_error(msg) {}
};

struct ThresholdSelectionFailed : std::runtime_error {
    explicit ThresholdSelectionFailed(const std::string& msg) : std::runtime_error(msg) {}
};

struct CalibrationFailed : std::runtime_error {
    explicit CalibrationFailed(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown when a logistic MLE has no finite optimum. `direction` is the sign of
// the diverging slope.
struct SeparationError : std::runtime_error {
    int direction;
    explicit SeparationError(const std::string& msg, int dir)
        : std::runtime_error(msg), direction(dir) {}
};

struct UndefinedThreshold : std::runtime_error {
    explicit UndefinedThreshold(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace idf

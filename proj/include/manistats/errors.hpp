#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace manistats {

// Base error carrying a stable machine-readable category, used by the CLI
// to map failures to exit codes.
class Error : public std::runtime_error {
 public:
  Error(std::string category, const std::string& message)
      : std::runtime_error(message), category_(std::move(category)) {}
  const std::string& category() const { return category_; }

 private:
  std::string category_;
};

struct GeometryMismatchError : Error {
  explicit GeometryMismatchError(const std::string& msg)
      : Error("geometry_mismatch", msg) {}
};

struct CutLocusError : Error {
  explicit CutLocusError(const std::string& msg) : Error("cut_locus", msg) {}
};

struct EmptySampleError : Error {
  explicit EmptySampleError(const std::string& msg)
      : Error("empty_sample", msg) {}
};

struct ZeroVarianceError : Error {
  explicit ZeroVarianceError(const std::string& msg)
      : Error("zero_variance", msg) {}
};

struct InsufficientDataError : Error {
  explicit InsufficientDataError(const std::string& msg)
      : Error("insufficient_data", msg) {}
};

struct DegenerateCovarianceError : Error {
  explicit DegenerateCovarianceError(const std::string& msg)
      : Error("degenerate_covariance", msg) {}
};

struct ValidationError : Error {
  explicit ValidationError(const std::string& msg)
      : Error("validation", msg) {}
};

struct IoError : Error {
  explicit IoError(const std::string& msg) : Error("io", msg) {}
};

}  // namespace manistats

#ifndef LPSIM_ERROR_H_
#define LPSIM_ERROR_H_

#include <stdexcept>
#include <string>

namespace lpsim {

// Base for every error raised by the toolkit. `kind()` is a stable
// machine-readable tag used by the CLI error JSON.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

// A parameter is outside its valid domain. `field()` names the offender.
class ParameterError : public Error {
 public:
  ParameterError(std::string field, const std::string& message)
      : Error("parameter", field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class SizingError : public Error {
 public:
  explicit SizingError(const std::string& message) : Error("sizing", message) {}
};

class DimensionMismatch : public Error {
 public:
  explicit DimensionMismatch(const std::string& message)
      : Error("dimension_mismatch", message) {}
};

class IoError : public Error {
 public:
  IoError(std::string path, const std::string& message)
      : Error("io", path + ": " + message), path_(std::move(path)) {}

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace lpsim

#endif  // LPSIM_ERROR_H_

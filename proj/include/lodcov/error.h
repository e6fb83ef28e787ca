#ifndef LODCOV_ERROR_H_
#define LODCOV_ERROR_H_

#include <stdexcept>
#include <string>

namespace lodcov {

// Error categories raised by the library. The CLI maps them onto exit codes.
enum class ErrorKind {
  kIo,
  kSchema,
  kDuplicateKey,
  kValidation,
  kConfig,
  kArgument,
  kTransport,
  kParse,
  kShape,
  kIncompatibleSnapshot,
  kEmptyMatrix,
  kInsufficientData,
  kUndefinedMetric,
  kDegenerateFit,
  kEmptyIntersection,
};

const char *error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string &message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace lodcov

#endif  // LODCOV_ERROR_H_

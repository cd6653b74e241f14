#ifndef TRACKSCOPE_ERROR_H_
#define TRACKSCOPE_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace trackscope {

enum class ErrorCode {
  kMalformedUri,
  kHostIsPublicSuffix,
  kSchemaError,
  kDuplicateDomain,
  kEmptyCorpus,
  kVersionMismatch,
  kSchemaVersionMismatch,
  kCorruptLine,
  kIoError,
  kSerializationError,
  kConfigError,
  kMissingInput,
  kEndpoint,
  kInvalidArgument,
};

std::string_view ErrorCodeName(ErrorCode code);

// All library failures surface as this exception. `code()` is stable and is
// what the CLI prints; the message carries detail for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace trackscope

#endif  // TRACKSCOPE_ERROR_H_

#include "trackscope/error.h"

namespace trackscope {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedUri: return "MalformedUri";
    case ErrorCode::kHostIsPublicSuffix: return "HostIsPublicSuffix";
    case ErrorCode::kSchemaError: return "SchemaError";
    case ErrorCode::kDuplicateDomain: return "DuplicateDomain";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kVersionMismatch: return "VersionMismatch";
    case ErrorCode::kSchemaVersionMismatch: return "SchemaVersionMismatch";
    case ErrorCode::kCorruptLine: return "CorruptLine";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kSerializationError: return "SerializationError";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kMissingInput: return "MissingInput";
    case ErrorCode::kEndpoint: return "endpoint";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace trackscope

#ifndef TRACKSCOPE_DIGEST_H_
#define TRACKSCOPE_DIGEST_H_

#include <string>
#include <string_view>

namespace trackscope {

// Lowercase hex SHA-256.
std::string Sha256Hex(std::string_view data);

// Whole-file read; throws Error(kIoError).
std::string ReadFileToString(const std::string& path);

// Writes via a temporary sibling and rename; throws Error(kIoError).
void WriteStringToFile(const std::string& path, std::string_view contents);

}  // namespace trackscope

#endif  // TRACKSCOPE_DIGEST_H_

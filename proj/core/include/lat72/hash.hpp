#pragma once

#include <string>
#include <string_view>

#include "lat72/matrix.hpp"

namespace lat72 {

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view data);

/// Hash of the canonical Gram-file rendering of a matrix.
std::string gram_hash(const RatMatrix& gram);

/// SHA-256 of a file's contents; throws InvalidInput when unreadable.
std::string file_hash(const std::string& path);

}  // namespace lat72

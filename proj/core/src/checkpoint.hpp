#pragma once

// Line-oriented "key: value" files shared by the checkpointing pipelines.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace lat72::detail {

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Writes `header`, the pairs and a closing "end" line through a temporary
/// file renamed into place, so a crash never leaves a half-written file.
void write_kv_file(const std::string& path, const std::string& header, const KeyValues& kv);

/// nullopt when the file does not exist; CheckpointCorrupt when the header is
/// wrong, a line is malformed or the "end" line is missing.
std::optional<std::map<std::string, std::string>> read_kv_file(const std::string& path, const std::string& header);

/// Numeric field or CheckpointCorrupt.
std::uint64_t kv_u64(const std::map<std::string, std::string>& kv, const std::string& key, const std::string& path);

}  // namespace lat72::detail

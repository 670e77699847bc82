#include "checkpoint.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>

#include "lat72/error.hpp"

namespace lat72::detail {

void write_kv_file(const std::string& path, const std::string& header, const KeyValues& kv) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp);
    os << header << "\n";
    for (const auto& [k, v] : kv) os << k << ": " << v << "\n";
    os << "end\n";
    if (!os) throw Error(ErrorKind::InvalidInput, "cannot write checkpoint " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

std::optional<std::map<std::string, std::string>> read_kv_file(const std::string& path, const std::string& header) {
  std::ifstream is(path);
  if (!is) return std::nullopt;
  auto corrupt = [&](const std::string& why) { return Error(ErrorKind::CheckpointCorrupt, path + ": " + why); };
  std::string line;
  if (!std::getline(is, line) || line != header) throw corrupt("bad header");
  std::map<std::string, std::string> kv;
  while (std::getline(is, line)) {
    if (line == "end") return kv;
    auto colon = line.find(": ");
    if (colon == std::string::npos) throw corrupt("malformed line");
    kv[line.substr(0, colon)] = line.substr(colon + 2);
  }
  throw corrupt("truncated");
}

std::uint64_t kv_u64(const std::map<std::string, std::string>& kv, const std::string& key, const std::string& path) {
  auto it = kv.find(key);
  if (it == kv.end()) throw Error(ErrorKind::CheckpointCorrupt, path + ": missing field " + key);
  try {
    std::size_t used = 0;
    auto v = std::stoull(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::logic_error&) {
    throw Error(ErrorKind::CheckpointCorrupt, path + ": non-numeric field " + key);
  }
}

}  // namespace lat72::detail

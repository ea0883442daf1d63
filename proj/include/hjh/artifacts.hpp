#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace hjh {

std::string sha256_hex(const std::string& bytes);

// Files are held in memory and written together, so a rejected run leaves nothing behind.
class ArtifactSet {
 public:
  void add(std::string file, std::string content);
  void add_json(std::string file, const nlohmann::json& j);
  bool empty() const noexcept { return files_.empty(); }
  const std::vector<std::pair<std::string, std::string>>& files() const noexcept { return files_; }
  // [{file, bytes, sha256}] in insertion order.
  nlohmann::json digest() const;
  void write(const std::filesystem::path& dir) const;

 private:
  std::vector<std::pair<std::string, std::string>> files_;
};

}  // namespace hjh

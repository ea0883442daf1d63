#include "hjh/artifacts.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <openssl/evp.h>

namespace hjh {

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr))
    throw std::runtime_error("SHA-256 digest failed");
  std::ostringstream os;
  for (unsigned int k = 0; k < len; ++k) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[k]);
  return os.str();
}

void ArtifactSet::add(std::string file, std::string content) {
  for (auto& f : files_)
    if (f.first == file) {
      f.second = std::move(content);
      return;
    }
  files_.emplace_back(std::move(file), std::move(content));
}

void ArtifactSet::add_json(std::string file, const nlohmann::json& j) { add(std::move(file), j.dump(2) + "\n"); }

nlohmann::json ArtifactSet::digest() const {
  auto out = nlohmann::json::array();
  for (const auto& [name, content] : files_)
    out.push_back({{"file", name}, {"bytes", content.size()}, {"sha256", sha256_hex(content)}});
  return out;
}

void ArtifactSet::write(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  for (const auto& [name, content] : files_) {
    std::ofstream out(dir / name, std::ios::binary);
    out << content;
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
  }
}

}  // namespace hjh

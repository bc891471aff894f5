#include "awgrpon/manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <memory>
#include <stdexcept>

namespace awgrpon {

std::string sha256_hex(std::string_view data) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest.data(), &len) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

void RunManifest::add_input(std::string path, std::string_view contents) {
  inputs.push_back({std::move(path), sha256_hex(contents)});
}

void RunManifest::add_output(std::string path, std::string_view contents) {
  outputs.push_back({std::move(path), sha256_hex(contents)});
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json j;
  j["tool"] = "awgrpon";
  j["tool_version"] = kToolVersion;
  j["format_version"] = kFormatVersion;
  j["command"] = command;
  j["config"] = config;
  auto files = [](const std::vector<FileDigest>& list) {
    auto arr = nlohmann::json::array();
    for (const auto& f : list) arr.push_back({{"path", f.path}, {"sha256", f.sha256}});
    return arr;
  };
  j["inputs"] = files(inputs);
  j["outputs"] = files(outputs);
  return j;
}

}  // namespace awgrpon

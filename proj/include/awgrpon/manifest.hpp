#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace awgrpon {

inline constexpr std::string_view kToolVersion = "1.0.0";
inline constexpr int kFormatVersion = 1;

std::string sha256_hex(std::string_view data);

struct FileDigest {
  std::string path;
  std::string sha256;
};

// One per CLI run. Carries no timestamps so identical runs give identical manifests.
struct RunManifest {
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  std::vector<FileDigest> inputs;
  std::vector<FileDigest> outputs;

  void add_input(std::string path, std::string_view contents);
  void add_output(std::string path, std::string_view contents);
  nlohmann::json to_json() const;
};

}  // namespace awgrpon

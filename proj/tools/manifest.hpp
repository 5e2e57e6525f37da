#pragma once

// Run manifest. The hash covers everything except the timestamp, so equal
// inputs and flags give equal report bytes.

#include <array>
#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "tracecontract/contract.hpp"

namespace tracecontract::cli {

inline constexpr const char* kToolVersion = "0.1.0";

inline std::string sha256_hex(const std::string& bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct RunManifest {
  std::string command;
  std::string contract_sha256;  // empty when the command takes no contract
  ContractSettings settings;
  std::vector<std::pair<std::string, std::string>> inputs;  // path, sha256
  std::string timestamp;

  nlohmann::ordered_json hashed_fields() const {
    nlohmann::ordered_json j;
    j["tool_version"] = kToolVersion;
    j["command"] = command;
    j["contract_sha256"] = contract_sha256;
    j["tolerance"] = settings.tolerance;
    j["silence_radius"] = settings.silence_ratio * settings.tolerance;
    j["merge_gap"] = settings.merge_gap;
    j["matcher"] = to_string(settings.matcher);
    j["exact_bound"] = settings.exact_bound;
    j["soft_scale"] = settings.soft_scale;
    j["inputs"] = nlohmann::ordered_json::array();
    for (const auto& [path, hash] : inputs) j["inputs"].push_back({{"path", path}, {"sha256", hash}});
    return j;
  }

  std::string hash() const { return sha256_hex(hashed_fields().dump()); }

  std::string to_json() const {
    auto j = hashed_fields();
    j["manifest_hash"] = hash();
    j["timestamp"] = timestamp;
    return j.dump(2) + "\n";
  }
};

}  // namespace tracecontract::cli

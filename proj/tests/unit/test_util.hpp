#pragma once

#include <filesystem>
#include <memory>
#include <random>
#include <string>

#include "findebate/backends.hpp"
#include "findebate/gateway.hpp"
#include "findebate/transcript.hpp"

namespace findebate::testkit {

inline std::filesystem::path fixture_path(const std::string& name) {
  return std::filesystem::path(FINDEBATE_FIXTURE_DIR) / name;
}

inline GatewayOptions no_sleep_options() {
  GatewayOptions o;
  o.sleep = [](std::chrono::milliseconds) {};
  return o;
}

struct MockRig {
  std::shared_ptr<MockChatBackend> chat = std::make_shared<MockChatBackend>();
  std::shared_ptr<OfflineEmbedder> embed = std::make_shared<OfflineEmbedder>(256);
  ModelGateway gateway{chat, embed, no_sleep_options()};
};

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("findebate_test_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace findebate::testkit

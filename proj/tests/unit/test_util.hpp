#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include <unistd.h>

#include "planrag/error.hpp"

namespace testutil {

/// Code of the planrag::Error thrown by `f`, or nullopt when nothing is thrown.
inline std::optional<planrag::ErrorCode> error_code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const planrag::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("planrag-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
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

}  // namespace testutil

#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <string>

#include <unistd.h>

namespace bevalkit::testing {

inline std::filesystem::path fixture_dir() { return BEVALKIT_FIXTURE_DIR; }
inline std::filesystem::path golden_dir() { return BEVALKIT_GOLDEN_DIR; }

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = std::filesystem::temp_directory_path() /
            ("bevalkit-test-" + std::to_string(::getpid()) + "-" + std::to_string(stamp) + "-" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

  /// Copies every fixture `.pos` file in; returns the directory.
  const std::filesystem::path& with_fixtures() const {
    for (const auto& entry : std::filesystem::directory_iterator(fixture_dir()))
      if (entry.path().extension() == ".pos")
        std::filesystem::copy_file(entry.path(), path_ / entry.path().filename());
    return path_;
  }

 private:
  std::filesystem::path path_;
};

}  // namespace bevalkit::testing

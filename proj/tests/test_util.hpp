#pragma once

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "foodsig/csv.hpp"

namespace foodsig::testutil {

// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("foodsig_" + tag + "_" + std::to_string(++counter) + "_" +
             std::to_string(static_cast<unsigned>(::getpid())));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string str() const { return path_.string(); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline std::string data_file(const std::string& name) {
  return std::string(FOODSIG_DATA_DIR) + "/" + name;
}

}  // namespace foodsig::testutil

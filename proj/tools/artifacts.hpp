#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace sqsd::cli {

/// Writes artifacts into one directory and records their sizes and hashes for
/// the manifest. The manifest timestamp is the only run-dependent field.
class ArtifactWriter {
 public:
  ArtifactWriter(std::filesystem::path dir, std::string command, std::string config_hash);

  void write(const std::string& name, const std::string& bytes);
  void note(std::string text) { notes_.push_back(std::move(text)); }
  void finish() const;

  const std::filesystem::path& dir() const noexcept { return dir_; }

 private:
  struct Entry {
    std::string name;
    std::size_t bytes;
    std::string hash;
  };
  std::filesystem::path dir_;
  std::string command_;
  std::string config_hash_;
  std::vector<Entry> entries_;
  std::vector<std::string> notes_;
};

}  // namespace sqsd::cli

#include "artifacts.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "run_config.hpp"
#include "sqsd/io.hpp"

namespace sqsd::cli {

ArtifactWriter::ArtifactWriter(std::filesystem::path dir, std::string command, std::string config_hash)
    : dir_(std::move(dir)), command_(std::move(command)), config_hash_(std::move(config_hash)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw CliError(kExitFailure, fmt::format("cannot create {}: {}", dir_.string(), ec.message()));
}

void ArtifactWriter::write(const std::string& name, const std::string& bytes) {
  const auto path = dir_ / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw CliError(kExitFailure, fmt::format("cannot write {}", path.string()));
  entries_.push_back({name, bytes.size(), hex64(fnv1a(bytes))});
}

void ArtifactWriter::finish() const {
  nlohmann::json artifacts = nlohmann::json::array();
  for (const auto& e : entries_) {
    artifacts.push_back({{"file", e.name}, {"bytes", e.bytes}, {"fnv1a", e.hash}});
  }
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  nlohmann::json m{{"command", command_},
                   {"config_hash", config_hash_},
                   {"artifacts", artifacts},
                   {"notes", notes_},
                   {"created_utc", fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(now))}};
  std::ofstream out(dir_ / "manifest.json", std::ios::trunc);
  out << m.dump(2) << "\n";
  if (!out) throw CliError(kExitFailure, "cannot write manifest.json");
}

}  // namespace sqsd::cli

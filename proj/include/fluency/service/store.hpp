#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fluency/service/record.hpp"

namespace fluency::service {

/// Durable session storage under <data_dir>/sessions:
///   <id>.jsonl  append-only log; each line is {"seq", "ops"} where ops is
///               an RFC 6902 patch from the previous state to the new one
///   <id>.wav    the submitted audio, written once
/// Replaying a log reproduces the last saved record. A torn final line (crash
/// mid-append) is ignored.
class SessionStore {
 public:
  explicit SessionStore(std::filesystem::path data_dir);

  void save(const SessionRecord& record);
  void write_audio(const std::string& id, std::string_view wav_bytes);
  std::string read_audio(const std::string& id) const;

  /// Every session found on disk, replayed from its log.
  std::vector<SessionRecord> load_all();

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path log_path(const std::string& id) const;

  std::filesystem::path dir_;
  std::mutex mutex_;
  std::map<std::string, nlohmann::json> last_;
  std::map<std::string, long> seq_;
};

}  // namespace fluency::service

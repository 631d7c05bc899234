#include "fluency/service/store.hpp"

#include <fstream>
#include <sstream>

#include "fluency/core/error.hpp"

namespace fluency::service {

namespace fs = std::filesystem;
using nlohmann::json;

SessionStore::SessionStore(fs::path data_dir) : dir_(std::move(data_dir) / "sessions") {
  fs::create_directories(dir_);
}

fs::path SessionStore::log_path(const std::string& id) const {
  return dir_ / (id + ".jsonl");
}

void SessionStore::save(const SessionRecord& record) {
  json next = record;
  std::lock_guard lock(mutex_);
  json& prev = last_[record.id];
  json ops = json::diff(prev, next);
  if (ops.empty()) return;
  json line = {{"seq", seq_[record.id]++}, {"ops", std::move(ops)}};
  std::ofstream out(log_path(record.id), std::ios::app | std::ios::binary);
  out << line.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
  out.flush();
  if (!out) throw Error(ErrorCode::InvalidState, "cannot write session log " + record.id);
  prev = std::move(next);
}

void SessionStore::write_audio(const std::string& id, std::string_view wav_bytes) {
  std::ofstream out(dir_ / (id + ".wav"), std::ios::binary | std::ios::trunc);
  out.write(wav_bytes.data(), static_cast<std::streamsize>(wav_bytes.size()));
  if (!out) throw Error(ErrorCode::InvalidState, "cannot write audio " + id);
}

std::string SessionStore::read_audio(const std::string& id) const {
  std::ifstream in(dir_ / (id + ".wav"), std::ios::binary);
  if (!in) throw Error(ErrorCode::NotFound, "audio for session " + id);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<SessionRecord> SessionStore::load_all() {
  std::vector<SessionRecord> out;
  std::lock_guard lock(mutex_);
  for (const auto& entry : fs::directory_iterator(dir_)) {
    if (entry.path().extension() != ".jsonl") continue;
    const std::string id = entry.path().stem().string();
    std::ifstream in(entry.path(), std::ios::binary);
    json state = nullptr;
    long seq = 0;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      json event = json::parse(line, nullptr, false);
      if (event.is_discarded() || !event.contains("ops")) break;
      try {
        state = state.patch(event["ops"]);
      } catch (const json::exception&) {
        break;
      }
      seq = event.value("seq", seq) + 1;
    }
    if (!state.is_object()) continue;
    try {
      out.push_back(state.get<SessionRecord>());
    } catch (const std::exception&) {
      continue;  // unreadable record; leave the file for inspection
    }
    last_[id] = std::move(state);
    seq_[id] = seq;
  }
  return out;
}

}  // namespace fluency::service

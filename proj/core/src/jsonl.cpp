#include "mae/jsonl.hpp"

#include <fstream>
#include <sstream>

namespace mae {

RecordError::RecordError(const std::filesystem::path& path, std::size_t line, const std::string& what)
    : Error(path.string() + ":" + std::to_string(line) + ": " + what), line_(line) {}

void read_jsonl(const std::filesystem::path& path,
                const std::function<void(const json&, std::size_t)>& visit) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::exception& e) {
      throw RecordError(path, number, std::string("invalid JSON: ") + e.what());
    }
    try {
      visit(record, number);
    } catch (const RecordError&) {
      throw;
    } catch (const std::exception& e) {
      throw RecordError(path, number, e.what());
    }
  }
}

void write_jsonl(const std::filesystem::path& path, const std::vector<json>& records) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    for (const auto& r : records) out << r.dump() << '\n';
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void append_jsonl(const std::filesystem::path& path, const std::vector<json>& records) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw Error("cannot append to " + path.string());
  for (const auto& r : records) out << r.dump() << '\n';
  out.flush();
  if (!out) throw Error("append failed for " + path.string());
}

void append_jsonl(const std::filesystem::path& path, const json& record) {
  append_jsonl(path, std::vector<json>{record});
}

void filter_jsonl(const std::filesystem::path& path, const std::function<bool(const json&)>& keep) {
  if (!std::filesystem::exists(path)) return;
  std::vector<json> kept;
  read_jsonl(path, [&](const json& r, std::size_t) {
    if (keep(r)) kept.push_back(r);
  });
  write_jsonl(path, kept);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace mae

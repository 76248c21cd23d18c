#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "mae/domain.hpp"

namespace mae {

/// A malformed record in a line-delimited file. line() is 1-based.
class RecordError : public Error {
 public:
  RecordError(const std::filesystem::path& path, std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Calls `visit(record, line_number)` for every non-blank line. JSON syntax
/// errors and exceptions thrown by `visit` surface as RecordError.
void read_jsonl(const std::filesystem::path& path,
                const std::function<void(const json&, std::size_t)>& visit);

/// Writes one compact JSON document per line, via a temporary file renamed
/// into place.
void write_jsonl(const std::filesystem::path& path, const std::vector<json>& records);

/// Appends one line per record and flushes.
void append_jsonl(const std::filesystem::path& path, const json& record);
void append_jsonl(const std::filesystem::path& path, const std::vector<json>& records);

/// Keeps only the lines for which `keep` returns true.
void filter_jsonl(const std::filesystem::path& path, const std::function<bool(const json&)>& keep);

std::string read_file(const std::filesystem::path& path);

}  // namespace mae

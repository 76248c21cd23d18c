#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "mae/domain.hpp"
#include "mae/random.hpp"

namespace mae {

class PoolError : public Error {
 public:
  using Error::Error;
};

struct SeedRecord {
  std::string text;
  std::string source;
};

struct AdmissionEntry {
  int step = 0;
  std::string question_id;
  double quality_score = 0.0;
  bool admitted = false;
  bool operator==(const AdmissionEntry&) const = default;
};

/// The valid-question dataset. Seed questions enter unfiltered; generated
/// questions enter only through admit(). Ids are content hashes, so a
/// question is stored at most once. Mutation is not synchronized; the
/// orchestrator owns the pool and serializes writes.
class QuestionPool {
 public:
  const std::vector<Question>& questions() const { return questions_; }
  const std::vector<AdmissionEntry>& admission_log() const { return log_; }
  std::size_t size() const { return questions_.size(); }
  bool empty() const { return questions_.empty(); }
  bool contains(const std::string& id) const { return index_.contains(id); }
  const Question* find(const std::string& id) const;

  /// Adds a seed-origin question; returns false for a duplicate.
  bool add_seed(Question q);

  /// Quality filter. Admits iff quality >= threshold (so a score equal to the
  /// threshold passes) and the question is new. Every call is logged.
  bool admit(Question q, double quality, double threshold, int step);

  /// Uniform draw. Throws PoolError when empty, so the caller can fall back
  /// to from-scratch generation.
  const Question& sample_reference(Rng& rng) const;

  std::size_t admitted_count() const;
  std::size_t rejected_count() const;

  void snapshot(const std::filesystem::path& path) const;
  /// Throws RecordError naming the first bad line.
  static QuestionPool restore(const std::filesystem::path& path);

  /// FNV-1a over the canonical serialized form, including the admission log.
  std::string content_hash() const;

  bool operator==(const QuestionPool& other) const {
    return questions_ == other.questions_ && log_ == other.log_;
  }

 private:
  void insert(Question q);

  std::vector<Question> questions_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<AdmissionEntry> log_;
};

/// Builds a pool of seed questions, deduplicated by content. An empty input
/// is accepted only with allow_empty (the zero setting bootstraps its own
/// seeds).
QuestionPool ingest_seed(std::span<const SeedRecord> records, bool allow_empty = false);

/// Reads `{"text": ..., "source": ...}` lines.
std::vector<SeedRecord> load_seed_file(const std::filesystem::path& path);

/// The question-answer pair dataset. Append-only.
class PairPool {
 public:
  const std::vector<QAPair>& pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }

  void record(QAPair pair);
  /// n uniform draws with replacement. Throws PoolError when empty or n < 1.
  std::vector<QAPair> sample(Rng& rng, std::size_t n) const;

  void snapshot(const std::filesystem::path& path) const;
  static PairPool restore(const std::filesystem::path& path);
  std::string content_hash() const;

  bool operator==(const PairPool& other) const { return pairs_ == other.pairs_; }

 private:
  std::vector<QAPair> pairs_;
};

void to_json(json& j, const AdmissionEntry& e);
void from_json(const json& j, AdmissionEntry& e);

}  // namespace mae

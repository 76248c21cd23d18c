#include "mae/datapools.hpp"

#include "mae/jsonl.hpp"

namespace mae {

void to_json(json& j, const AdmissionEntry& e) {
  j = json{{"step", e.step},
           {"question_id", e.question_id},
           {"quality_score", e.quality_score},
           {"admitted", e.admitted}};
}

void from_json(const json& j, AdmissionEntry& e) {
  e.step = j.at("step").get<int>();
  e.question_id = j.at("question_id").get<std::string>();
  e.quality_score = j.at("quality_score").get<double>();
  e.admitted = j.at("admitted").get<bool>();
}

const Question* QuestionPool::find(const std::string& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &questions_[it->second];
}

void QuestionPool::insert(Question q) {
  index_.emplace(q.id, questions_.size());
  questions_.push_back(std::move(q));
}

bool QuestionPool::add_seed(Question q) {
  if (!is_seed(q.origin)) throw std::invalid_argument("add_seed: question is not seed-origin");
  if (contains(q.id)) return false;
  insert(std::move(q));
  return true;
}

bool QuestionPool::admit(Question q, double quality, double threshold, int step) {
  if (is_seed(q.origin)) throw std::invalid_argument("admit: seed questions bypass the filter");
  if (!(quality >= 0.0 && quality <= 1.0)) throw std::invalid_argument("admit: quality outside [0,1]");
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw std::invalid_argument("admit: threshold outside [0,1]");
  }
  const bool admitted = quality >= threshold && !contains(q.id);
  log_.push_back(AdmissionEntry{step, q.id, quality, admitted});
  if (admitted) {
    q.quality_score = quality;
    insert(std::move(q));
  }
  return admitted;
}

const Question& QuestionPool::sample_reference(Rng& rng) const {
  if (questions_.empty()) {
    throw PoolError("question pool is empty; generate from scratch instead");
  }
  return questions_[rng.index(questions_.size())];
}

std::size_t QuestionPool::admitted_count() const {
  std::size_t n = 0;
  for (const auto& e : log_) n += e.admitted ? 1 : 0;
  return n;
}

std::size_t QuestionPool::rejected_count() const { return log_.size() - admitted_count(); }

void QuestionPool::snapshot(const std::filesystem::path& path) const {
  std::vector<json> lines;
  lines.reserve(questions_.size() + log_.size());
  for (const auto& q : questions_) {
    json j = q;
    j["type"] = "question";
    lines.push_back(std::move(j));
  }
  for (const auto& e : log_) {
    json j = e;
    j["type"] = "admission";
    lines.push_back(std::move(j));
  }
  write_jsonl(path, lines);
}

QuestionPool QuestionPool::restore(const std::filesystem::path& path) {
  QuestionPool pool;
  read_jsonl(path, [&](const json& r, std::size_t) {
    const auto type = r.at("type").get<std::string>();
    if (type == "question") {
      auto q = r.get<Question>();
      if (pool.contains(q.id)) throw PoolError("duplicate question id " + q.id);
      if (!is_seed(q.origin) && !q.quality_score) {
        throw PoolError("generated question " + q.id + " has no quality score");
      }
      pool.insert(std::move(q));
    } else if (type == "admission") {
      pool.log_.push_back(r.get<AdmissionEntry>());
    } else {
      throw PoolError("unknown record type '" + type + "'");
    }
  });
  return pool;
}

std::string QuestionPool::content_hash() const {
  std::uint64_t h = fnv1a64("");
  for (const auto& q : questions_) h = fnv1a64(json(q).dump() + "\n", h);
  for (const auto& e : log_) h = fnv1a64(json(e).dump() + "\n", h);
  return hex64(h);
}

QuestionPool ingest_seed(std::span<const SeedRecord> records, bool allow_empty) {
  if (records.empty() && !allow_empty) {
    throw PoolError("seed set is empty; only the zero setting may start without seeds");
  }
  QuestionPool pool;
  for (const auto& r : records) {
    if (normalize_whitespace(r.text).empty()) throw PoolError("empty seed text");
    pool.add_seed(make_question(r.text, SeedOrigin{r.source}));
  }
  return pool;
}

std::vector<SeedRecord> load_seed_file(const std::filesystem::path& path) {
  std::vector<SeedRecord> out;
  read_jsonl(path, [&](const json& r, std::size_t) {
    SeedRecord s{r.at("text").get<std::string>(), r.value("source", std::string{})};
    if (normalize_whitespace(s.text).empty()) throw PoolError("empty seed text");
    out.push_back(std::move(s));
  });
  return out;
}

void PairPool::record(QAPair pair) {
  if (pair.answer.question_id != pair.question.id) {
    throw std::invalid_argument("record: answer refers to a different question");
  }
  pairs_.push_back(std::move(pair));
}

std::vector<QAPair> PairPool::sample(Rng& rng, std::size_t n) const {
  if (pairs_.empty()) throw PoolError("pair pool is empty");
  if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
  std::vector<QAPair> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(pairs_[rng.index(pairs_.size())]);
  return out;
}

void PairPool::snapshot(const std::filesystem::path& path) const {
  std::vector<json> lines;
  lines.reserve(pairs_.size());
  for (const auto& p : pairs_) {
    json j = p;
    j["type"] = "pair";
    lines.push_back(std::move(j));
  }
  write_jsonl(path, lines);
}

PairPool PairPool::restore(const std::filesystem::path& path) {
  PairPool pool;
  read_jsonl(path, [&](const json& r, std::size_t) {
    if (r.at("type").get<std::string>() != "pair") throw PoolError("expected a pair record");
    pool.record(r.get<QAPair>());
  });
  return pool;
}

std::string PairPool::content_hash() const {
  std::uint64_t h = fnv1a64("");
  for (const auto& p : pairs_) h = fnv1a64(json(p).dump() + "\n", h);
  return hex64(h);
}

}  // namespace mae

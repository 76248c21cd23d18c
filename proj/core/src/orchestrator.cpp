#include "mae/orchestrator.hpp"

#include <atomic>
#include <exception>
#include <thread>

#include <spdlog/spdlog.h>

#include "mae/advantage.hpp"
#include "mae/reward.hpp"
#include "mae/structured_output.hpp"

namespace mae {

GenerationMode choose_generation_mode(double p_ref, Rng& rng) {
  if (!(p_ref >= 0.0 && p_ref <= 1.0)) throw std::invalid_argument("p_ref outside [0,1]");
  return rng.bernoulli(p_ref) ? GenerationMode::kWithReference : GenerationMode::kFromScratch;
}

std::string_view to_string(StepEvent event) {
  switch (event) {
    case StepEvent::kPropose: return "Propose";
    case StepEvent::kJudgeQuality: return "JudgeQuality";
    case StepEvent::kSolveSample: return "SolveSample";
    case StepEvent::kAdmit: return "Admit";
    case StepEvent::kSolvePhase: return "SolvePhase";
    case StepEvent::kJudgeAnswers: return "JudgeAnswers";
    case StepEvent::kJudgePhase: return "JudgePhase";
    case StepEvent::kAdvantage: return "Advantage";
    case StepEvent::kUpdate: return "Update";
  }
  return "Unknown";
}

void EventTrace::record(StepEvent event, std::size_t times) {
  events_.insert(events_.end(), times, event);
}

std::vector<std::pair<StepEvent, std::size_t>> EventTrace::run_lengths() const {
  std::vector<std::pair<StepEvent, std::size_t>> out;
  for (auto e : events_) {
    if (!out.empty() && out.back().first == e) {
      ++out.back().second;
    } else {
      out.emplace_back(e, 1);
    }
  }
  return out;
}

void to_json(json& j, const StepReport& r) {
  json stats = json::object();
  for (const auto& [role, s] : r.advantage_stats) stats[std::string(to_string(role))] = s;
  j = json{{"step", r.step},
           {"proposed", r.proposed},
           {"admitted", r.admitted},
           {"pool_size", r.pool_size},
           {"pair_pool_size", r.pair_pool_size},
           {"mean_solver_reward", r.mean_solver_reward},
           {"mean_solver_judge", r.mean_solver_judge},
           {"mean_quality", r.mean_quality},
           {"mean_difficulty", r.mean_difficulty},
           {"mean_proposer_reward", r.mean_proposer_reward},
           {"judge_format_rate", r.judge_format_rate},
           {"advantage_stats", stats},
           {"degraded_generations", r.degraded_generations},
           {"solve_count_warnings", r.solve_count_warnings},
           {"update_applied", r.update_applied},
           {"aborted", r.aborted},
           {"abort_reason", r.abort_reason}};
}

void from_json(const json& j, StepReport& r) {
  r.step = j.at("step").get<int>();
  r.proposed = j.at("proposed").get<int>();
  r.admitted = j.at("admitted").get<int>();
  r.pool_size = j.at("pool_size").get<std::size_t>();
  r.pair_pool_size = j.at("pair_pool_size").get<std::size_t>();
  r.mean_solver_reward = j.at("mean_solver_reward").get<double>();
  r.mean_solver_judge = j.at("mean_solver_judge").get<double>();
  r.mean_quality = j.at("mean_quality").get<double>();
  r.mean_difficulty = j.at("mean_difficulty").get<double>();
  r.mean_proposer_reward = j.at("mean_proposer_reward").get<double>();
  r.judge_format_rate = j.at("judge_format_rate").get<double>();
  r.advantage_stats.clear();
  for (const auto& [name, s] : j.at("advantage_stats").items()) {
    r.advantage_stats[role_from_string(name)] = s.get<AdvantageStats>();
  }
  r.degraded_generations = j.at("degraded_generations").get<int>();
  r.solve_count_warnings = j.at("solve_count_warnings").get<int>();
  r.update_applied = j.at("update_applied").get<bool>();
  r.aborted = j.at("aborted").get<bool>();
  r.abort_reason = j.at("abort_reason").get<std::string>();
}

namespace {

struct Generated {
  std::string text;
  bool degraded = false;
};

/// Runs the requests on up to `parallelism` threads. Results keep request
/// order. A TransportError degrades to an empty completion; any other
/// exception is rethrown (the lowest-index one) after all workers finish.
std::vector<Generated> generate_all(Backend& backend, const std::vector<GenerationRequest>& requests,
                                    int parallelism) {
  std::vector<Generated> out(requests.size());
  std::vector<std::exception_ptr> errors(requests.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < requests.size(); i = next.fetch_add(1)) {
      try {
        out[i].text = backend.generate(requests[i]);
      } catch (const TransportError& e) {
        spdlog::warn("{} generation degraded to empty completion: {}",
                     to_string(requests[i].role), e.what());
        out[i] = Generated{"", true};
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const auto threads = std::min<std::size_t>(static_cast<std::size_t>(std::max(parallelism, 1)),
                                             requests.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

double mean(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

struct Proposal {
  GenerationMode mode = GenerationMode::kFromScratch;
  std::string parent_id;
  std::string prompt;
  std::string output;
  FormatLevel format = FormatLevel::kNone;
  std::optional<std::string> text;
  JudgeVerdict quality;
  std::string quality_prompt;
  std::vector<JudgeVerdict> samples;
  double difficulty = 0.0;
  bool admitted = false;
};

class StepRunner {
 public:
  StepRunner(TrainingState& work, const TrainConfig& config, Backend& backend, Rng& rng,
             const PromptSet& prompts, EventTrace* trace, int step)
      : work_(work), cfg_(config), backend_(backend), rng_(rng), prompts_(prompts), trace_(trace),
        step_(step) {}

  StepOutcome run() {
    report_.step = step_;
    proposer_phase();
    solver_phase();
    judge_phase();
    return finish();
  }

 private:
  GenerationRequest request(Role role, std::string prompt) {
    GenerationRequest r;
    r.role = role;
    r.prompt = std::move(prompt);
    r.temperature = cfg_.temperature;
    r.top_p = cfg_.top_p;
    r.max_new_units = cfg_.max_new_units;
    r.rng_seed = rng_.next_u64();
    return r;
  }

  std::vector<Generated> run_batch(const std::vector<GenerationRequest>& requests) {
    auto out = generate_all(backend_, requests, cfg_.parallelism);
    for (const auto& g : out) report_.degraded_generations += g.degraded ? 1 : 0;
    return out;
  }

  void trace(StepEvent e, std::size_t times = 1) {
    if (trace_ && times > 0) trace_->record(e, times);
  }

  std::string judge_answer_prompt(const std::string& question, const std::string& answer) const {
    return build_prompt(prompts_.get(PromptVariant::kJudgeAnswer),
                        {{"question", question}, {"answer", answer}});
  }

  void proposer_phase() {
    const auto batch = static_cast<std::size_t>(cfg_.batch_size);
    proposals_.resize(batch);

    std::vector<GenerationRequest> requests;
    for (auto& p : proposals_) {
      p.mode = choose_generation_mode(cfg_.reference_probability, rng_);
      if (p.mode == GenerationMode::kWithReference && !work_.questions.empty()) {
        const auto& ref = work_.questions.sample_reference(rng_);
        p.parent_id = ref.id;
        p.prompt = build_prompt(prompts_.get(PromptVariant::kProposeWithRef), {{"reference", ref.text}});
      } else {
        p.mode = GenerationMode::kFromScratch;
        p.prompt = build_prompt(prompts_.get(PromptVariant::kProposeNoRef), {});
      }
      requests.push_back(request(Role::kProposer, p.prompt));
    }
    const auto outputs = run_batch(requests);
    trace(StepEvent::kPropose, batch);

    std::vector<std::size_t> with_text;
    for (std::size_t i = 0; i < batch; ++i) {
      auto& p = proposals_[i];
      p.output = outputs[i].text;
      p.format = format_reward(extract_tagged(p.output, "question"));
      p.text = extract_question(p.output);
      if (p.text) {
        with_text.push_back(i);
      } else {
        p.quality = make_verdict(VerdictTarget::kQuestion, "", cfg_.neutral_score);
      }
    }

    // Question quality.
    requests.clear();
    for (auto i : with_text) {
      auto& p = proposals_[i];
      p.quality_prompt = build_prompt(prompts_.get(PromptVariant::kJudgeQuestion), {{"question", *p.text}});
      requests.push_back(request(Role::kJudge, p.quality_prompt));
    }
    auto verdicts = run_batch(requests);
    for (std::size_t k = 0; k < with_text.size(); ++k) {
      proposals_[with_text[k]].quality =
          make_verdict(VerdictTarget::kQuestion, verdicts[k].text, cfg_.neutral_score);
    }
    trace(StepEvent::kJudgeQuality, with_text.size());

    // Difficulty: N judged Solver samples per question.
    const auto n = static_cast<std::size_t>(cfg_.n_difficulty_samples);
    requests.clear();
    for (auto i : with_text) {
      const auto prompt = build_prompt(prompts_.get(PromptVariant::kSolve), {{"question", *proposals_[i].text}});
      for (std::size_t s = 0; s < n; ++s) requests.push_back(request(Role::kSolver, prompt));
    }
    const auto answers = run_batch(requests);
    requests.clear();
    for (std::size_t k = 0; k < answers.size(); ++k) {
      const auto& p = proposals_[with_text[k / n]];
      const auto a = parse_answer(question_id_for(*p.text), answers[k].text);
      requests.push_back(request(Role::kJudge, judge_answer_prompt(*p.text, a.text)));
    }
    verdicts = run_batch(requests);
    for (std::size_t k = 0; k < verdicts.size(); ++k) {
      proposals_[with_text[k / n]].samples.push_back(
          make_verdict(VerdictTarget::kAnswer, verdicts[k].text, cfg_.neutral_score));
    }
    trace(StepEvent::kSolveSample, verdicts.size());

    for (auto i : with_text) {
      auto& p = proposals_[i];
      const auto solve = mean_solve_score(p.samples, n);
      report_.solve_count_warnings += solve.count_mismatch ? 1 : 0;
      p.difficulty = difficulty_reward(solve.mean);
    }

    // Admission happens before the Solver phase so admitted questions are
    // immediately sampleable.
    for (auto i : with_text) {
      auto& p = proposals_[i];
      Origin origin = p.mode == GenerationMode::kWithReference
                          ? Origin{ReferenceOrigin{p.parent_id, step_}}
                          : Origin{ScratchOrigin{step_}};
      p.admitted = work_.questions.admit(make_question(*p.text, std::move(origin)), p.quality.normalized,
                                         cfg_.quality_threshold, step_);
      trace(StepEvent::kAdmit);
    }

    std::vector<double> rewards, qualities, difficulties;
    for (auto& p : proposals_) {
      const auto r = proposer_total(p.quality.normalized, p.difficulty, p.format, cfg_.weights);
      rollouts_.push_back(RolloutRecord{Role::kProposer, p.prompt, p.output, r.total, std::nullopt, step_});
      rewards.push_back(r.total);
      qualities.push_back(p.quality.normalized);
      difficulties.push_back(p.difficulty);
      report_.admitted += p.admitted ? 1 : 0;
    }
    report_.proposed = static_cast<int>(batch);
    report_.mean_proposer_reward = mean(rewards);
    report_.mean_quality = mean(qualities);
    report_.mean_difficulty = mean(difficulties);
  }

  void solver_phase() {
    const auto batch = static_cast<std::size_t>(cfg_.batch_size);
    std::vector<Question> questions;
    std::vector<GenerationRequest> requests;
    for (std::size_t i = 0; i < batch; ++i) {
      questions.push_back(work_.questions.sample_reference(rng_));
      requests.push_back(request(
          Role::kSolver, build_prompt(prompts_.get(PromptVariant::kSolve), {{"question", questions.back().text}})));
    }
    const auto outputs = run_batch(requests);
    trace(StepEvent::kSolvePhase, batch);

    std::vector<Answer> answers;
    std::vector<GenerationRequest> judge_requests;
    for (std::size_t i = 0; i < batch; ++i) {
      answers.push_back(parse_answer(questions[i].id, outputs[i].text));
      judge_requests.push_back(request(Role::kJudge, judge_answer_prompt(questions[i].text, answers[i].text)));
    }
    const auto judged = run_batch(judge_requests);
    trace(StepEvent::kJudgeAnswers, batch);

    std::vector<double> rewards, scores;
    for (std::size_t i = 0; i < batch; ++i) {
      const auto v = make_verdict(VerdictTarget::kAnswer, judged[i].text, cfg_.neutral_score);
      const auto r = solver_total(v.normalized, answers[i].format_level, cfg_.weights);
      rollouts_.push_back(RolloutRecord{Role::kSolver, requests[i].prompt, answers[i].raw_output, r.total,
                                        std::nullopt, step_});
      rewards.push_back(r.total);
      scores.push_back(v.normalized);
      work_.pairs.record(QAPair{questions[i], answers[i], step_});
    }
    report_.mean_solver_reward = mean(rewards);
    report_.mean_solver_judge = mean(scores);
  }

  void judge_phase() {
    std::vector<std::pair<std::string, std::string>> judged;  // (prompt, output)
    if (work_.pairs.empty()) {
      spdlog::info("step {}: pair pool empty, using question-quality verdicts as Judge rollouts", step_);
      for (const auto& p : proposals_) {
        if (p.text) judged.emplace_back(p.quality_prompt, p.quality.raw_output);
      }
    } else {
      const auto pairs = work_.pairs.sample(rng_, static_cast<std::size_t>(cfg_.batch_size));
      std::vector<GenerationRequest> requests;
      for (const auto& pair : pairs) {
        requests.push_back(request(Role::kJudge, judge_answer_prompt(pair.question.text, pair.answer.text)));
      }
      const auto outputs = run_batch(requests);
      for (std::size_t i = 0; i < pairs.size(); ++i) judged.emplace_back(requests[i].prompt, outputs[i].text);
      trace(StepEvent::kJudgePhase, pairs.size());
    }

    std::size_t exact = 0;
    for (auto& [prompt, output] : judged) {
      const auto format = parse_score(output, cfg_.neutral_score).format_level;
      exact += format == FormatLevel::kExact ? 1 : 0;
      rollouts_.push_back(
          RolloutRecord{Role::kJudge, std::move(prompt), std::move(output), judge_total(format).total,
                        std::nullopt, step_});
    }
    report_.judge_format_rate =
        judged.empty() ? 0.0 : static_cast<double>(exact) / static_cast<double>(judged.size());
  }

  StepOutcome finish() {
    auto normalized = compute_role_advantages(std::move(rollouts_), cfg_.advantage_epsilon);
    trace(StepEvent::kAdvantage);
    report_.advantage_stats = normalized.stats;

    UpdateBatch batch;
    batch.items.reserve(normalized.records.size());
    for (const auto& r : normalized.records) {
      batch.items.push_back(UpdateItem{r.role, r.prompt, r.completion, *r.advantage});
    }
    report_.update_applied = backend_.apply_update(batch).applied;
    trace(StepEvent::kUpdate);

    report_.pool_size = work_.questions.size();
    report_.pair_pool_size = work_.pairs.size();
    return StepOutcome{report_, std::move(normalized.records)};
  }

  TrainingState& work_;
  const TrainConfig& cfg_;
  Backend& backend_;
  Rng& rng_;
  const PromptSet& prompts_;
  EventTrace* trace_;
  int step_;

  StepReport report_;
  std::vector<Proposal> proposals_;
  std::vector<RolloutRecord> rollouts_;
};

const PromptSet& default_prompts() {
  static const PromptSet prompts;
  return prompts;
}

}  // namespace

StepOutcome run_training_step(TrainingState& state, const TrainConfig& config, Backend& backend, Rng& rng,
                              const StepOptions& options) {
  config.validate();
  if (state.questions.empty()) {
    throw PoolError("run_training_step: question pool is empty");
  }
  const int step = state.completed_steps + 1;
  const PromptSet& prompts = options.prompts ? *options.prompts : default_prompts();

  TrainingState work{state.questions, state.pairs, state.completed_steps};
  StepOutcome outcome;
  try {
    outcome = StepRunner(work, config, backend, rng, prompts, options.trace, step).run();
  } catch (const BackendError& e) {
    spdlog::error("step {} aborted: {}", step, e.what());
    outcome = StepOutcome{};
    outcome.report.step = step;
    outcome.report.aborted = true;
    outcome.report.abort_reason = e.what();
    outcome.report.pool_size = state.questions.size();
    outcome.report.pair_pool_size = state.pairs.size();
    state.completed_steps = step;
    return outcome;
  }
  state.questions = std::move(work.questions);
  state.pairs = std::move(work.pairs);
  state.completed_steps = step;
  return outcome;
}

std::vector<SeedRecord> bootstrap_seed_questions(Backend& backend, const TrainConfig& config,
                                                 std::size_t count, Rng& rng, const PromptSet* prompts) {
  const PromptSet& set = prompts ? *prompts : default_prompts();
  const auto prompt = build_prompt(set.get(PromptVariant::kProposeNoRef), {});
  std::vector<SeedRecord> out;
  std::vector<std::string> ids;
  for (std::size_t attempt = 0; attempt < 4 * count && out.size() < count; ++attempt) {
    GenerationRequest r;
    r.role = Role::kProposer;
    r.prompt = prompt;
    r.temperature = config.temperature;
    r.top_p = config.top_p;
    r.max_new_units = config.max_new_units;
    r.rng_seed = rng.next_u64();
    std::string output;
    try {
      output = backend.generate(r);
    } catch (const TransportError&) {
      continue;
    }
    auto text = extract_question(output);
    if (!text) continue;
    const auto id = question_id_for(*text);
    if (std::find(ids.begin(), ids.end(), id) != ids.end()) continue;
    ids.push_back(id);
    out.push_back(SeedRecord{*text, "self-generated"});
  }
  if (out.size() < count) {
    spdlog::warn("bootstrap produced {} of {} requested seed questions", out.size(), count);
  }
  return out;
}

}  // namespace mae

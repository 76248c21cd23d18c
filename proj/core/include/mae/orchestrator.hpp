#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mae/backend.hpp"
#include "mae/datapools.hpp"
#include "mae/domain.hpp"
#include "mae/prompts.hpp"
#include "mae/random.hpp"

namespace mae {

enum class GenerationMode { kWithReference, kFromScratch };

/// with_reference with probability p_ref.
GenerationMode choose_generation_mode(double p_ref, Rng& rng);

/// Observable milestones of one training step, in the order they occur.
enum class StepEvent {
  kPropose,        // one Proposer generation
  kJudgeQuality,   // one question-quality verdict
  kSolveSample,    // one judged difficulty sample
  kAdmit,          // one admission attempt
  kSolvePhase,     // one Solver-phase answer
  kJudgeAnswers,   // one verdict on a Solver-phase answer
  kJudgePhase,     // one Judge-phase generation
  kAdvantage,      // per-role normalization of the step's rollouts
  kUpdate,         // the synchronized update
};

std::string_view to_string(StepEvent event);

class EventTrace {
 public:
  void record(StepEvent event, std::size_t times = 1);
  const std::vector<StepEvent>& events() const { return events_; }
  /// Consecutive repeats collapsed to (event, count).
  std::vector<std::pair<StepEvent, std::size_t>> run_lengths() const;
  void clear() { events_.clear(); }

 private:
  std::vector<StepEvent> events_;
};

struct StepReport {
  int step = 0;
  int proposed = 0;
  int admitted = 0;
  std::size_t pool_size = 0;
  std::size_t pair_pool_size = 0;
  double mean_solver_reward = 0.0;
  double mean_solver_judge = 0.0;
  double mean_quality = 0.0;
  double mean_difficulty = 0.0;
  double mean_proposer_reward = 0.0;
  /// Fraction of Judge-phase generations with exactly one valid score tag.
  double judge_format_rate = 0.0;
  std::map<Role, AdvantageStats> advantage_stats;
  int degraded_generations = 0;
  int solve_count_warnings = 0;
  bool update_applied = false;
  bool aborted = false;
  std::string abort_reason;

  bool operator==(const StepReport&) const = default;
};

void to_json(json& j, const StepReport& r);
void from_json(const json& j, StepReport& r);

struct TrainingState {
  QuestionPool questions;
  PairPool pairs;
  int completed_steps = 0;
};

struct StepOptions {
  const PromptSet* prompts = nullptr;  // defaults when null
  EventTrace* trace = nullptr;
};

struct StepOutcome {
  StepReport report;
  /// Every rollout of the step with reward and advantage set; empty when the
  /// step aborted.
  std::vector<RolloutRecord> rollouts;
};

/// One synchronized training step:
///   Proposer phase: per batch slot choose a mode, generate, grade format,
///     judge quality, estimate difficulty from n_difficulty_samples judged
///     Solver answers, then attempt admission to the question pool;
///   Solver phase: answer questions drawn from the (updated) pool, judge the
///     answers, append every pair to the pair pool;
///   Judge phase: judge pairs drawn from the whole pair pool, rewarded on
///     format alone;
///   then per-role advantages and exactly one apply_update().
///
/// Generations that fail with TransportError become empty completions. A
/// BackendError aborts the step: pools are left untouched, no update is
/// applied, and the report carries the reason. completed_steps advances
/// either way. Throws PoolError if the question pool is empty.
StepOutcome run_training_step(TrainingState& state, const TrainConfig& config, Backend& backend,
                              Rng& rng, const StepOptions& options = {});

/// Zero setting: asks the Proposer for `count` distinct from-scratch
/// questions (source tag "self-generated"), giving up after 4*count tries.
std::vector<SeedRecord> bootstrap_seed_questions(Backend& backend, const TrainConfig& config,
                                                 std::size_t count, Rng& rng,
                                                 const PromptSet* prompts = nullptr);

}  // namespace mae

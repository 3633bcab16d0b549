#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "circuflow/compartments.hpp"
#include "circuflow/robot/policy.hpp"

namespace circuflow::robot {

struct EpisodeOutcome {
    bool success = false;
    bool aborted = false;
    int steps = 0;
    double final_distance = 0.0;  // m, at the last observed state
    double total_return = 0.0;
};

/// Runs one episode from `episode_seed`. Success is checked on each observed
/// state together with the torque chosen there; with `stop_on_success` the
/// episode ends at the first success.
EpisodeOutcome run_episode(const Policy& policy, const ReacherConfig& cfg, std::uint64_t episode_seed,
                           bool stop_on_success = true);

struct SuccessReport {
    std::size_t episodes = 0;
    std::size_t successes = 0;
    std::size_t aborted = 0;
    double success_rate = 0.0;
    double mean_final_distance = 0.0;  // m
    double mean_return = 0.0;
    double mean_step_time = 0.0;  // s of wall clock per control step; not reproducible
};

/// Episode n draws from stream_seed(seed, n). Aggregation runs in episode
/// order, so every field except `mean_step_time` is bit-identical for any
/// worker count.
SuccessReport evaluate_policy(const Policy& policy, std::size_t episodes, const ReacherConfig& cfg, std::uint64_t seed);

struct TrainerConfig {
    std::vector<int> hidden{16};
    int population = 48;
    int elites = 8;
    int generations = 60;
    int episodes_per_candidate = 32;  // fixed training set, shared by all candidates
    int validation_episodes = 64;     // separate set used to pick the returned policy
    double init_scale = 1.0;
    double init_std = 0.5;
    double min_std = 0.02;
    bool keep_elites = true;  // carry the previous elites into the next population

    void validate() const;  // throws std::invalid_argument
};

struct TrainLogRow {
    int generation = 0;
    double mean_return = 0.0;        // population mean over the training set
    double elite_mean_return = 0.0;  // mean of the elite returns
    double best_return = 0.0;
    double validation_return = 0.0;  // distribution mean on the validation set
};

struct TrainResult {
    MlpPolicy policy;
    MlpPolicy initial_policy;
    std::vector<TrainLogRow> log;
    double initial_validation_return = 0.0;
    double best_validation_return = 0.0;
    int best_generation = -1;  // -1 when no generation beat the initial policy
    bool improved() const { return best_generation >= 0; }
};

/// Cross-entropy search over MLP parameters. The returned policy is the best
/// validation scorer among the initial policy and each generation's mean.
TrainResult train_cem(const ReacherConfig& env, const TrainerConfig& trainer, std::uint64_t seed);

std::string training_log_csv(const std::vector<TrainLogRow>& log);

struct ReferenceAgent {
    const char* name;
    double success_rate;
};

/// Reference success rates of four deep-RL agents on the reaching task.
/// Metadata for reports; nothing here reproduces them.
inline constexpr ReferenceAgent kReferenceAgents[] = {
    {"SAC", 0.9597}, {"DDPG", 0.9337}, {"A2C", 0.6091}, {"PPO", 0.4183}};

struct SorterCoupling {
    SorterParams sorter;
    double sorted_per_day = 0.0;    // kg/day
    double rejected_per_day = 0.0;  // kg/day
};

/// Sorter driven by a picking robot: success rate s, q items per hour of
/// `item_mass` kg each. Throws std::invalid_argument unless item_mass, q > 0
/// and s in [0, 1].
SorterCoupling success_to_sorter(double success_rate, double item_mass, double items_per_hour,
                                 const std::string& material);
inline SorterCoupling success_to_sorter(const SuccessReport& report, double item_mass, double items_per_hour,
                                        const std::string& material) {
    return success_to_sorter(report.success_rate, item_mass, items_per_hour, material);
}

}  // namespace circuflow::robot

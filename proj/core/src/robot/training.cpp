#include "circuflow/robot/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "circuflow/parallel.hpp"

namespace circuflow::robot {

EpisodeOutcome run_episode(const Policy& policy, const ReacherConfig& cfg, std::uint64_t episode_seed,
                           bool stop_on_success) {
    Rng rng(episode_seed);
    ManipulatorState s = reset_episode(cfg, rng);
    const auto& crit = cfg.criterion;
    EpisodeOutcome out;
    int streak = 0;
    for (int step = 0; step < crit.max_steps; ++step) {
        const Observation obs = observe(s, cfg.arm);
        const double distance = std::hypot(obs[8], obs[9]);
        Vec2 tau = policy.act(obs);
        if (!std::isfinite(tau[0]) || !std::isfinite(tau[1])) {
            out.aborted = true;
            out.final_distance = distance;
            return out;
        }
        tau = clip_torque(tau, cfg.arm.torque_limit);
        const bool holds = distance < crit.distance_threshold && std::abs(tau[0]) < crit.torque_threshold &&
                           std::abs(tau[1]) < crit.torque_threshold;
        streak = holds ? streak + 1 : 0;
        if (streak >= crit.window && !out.success) {
            out.success = true;
            if (stop_on_success) {
                out.final_distance = distance;
                return out;
            }
        }
        const EnvStep next = step_env(s, tau, cfg);
        out.total_return += next.reward;
        out.steps = step + 1;
        if (next.aborted) {
            out.aborted = true;
            out.success = false;
            out.final_distance = distance;
            return out;
        }
        s = next.state;
    }
    out.final_distance = tip_distance(s, cfg.arm);
    return out;
}

SuccessReport evaluate_policy(const Policy& policy, std::size_t episodes, const ReacherConfig& cfg,
                              std::uint64_t seed) {
    if (episodes < 1) throw std::invalid_argument("at least one episode is required");
    cfg.validate();
    std::vector<EpisodeOutcome> outcomes(episodes);
    std::vector<double> seconds(episodes);
    parallel_for(episodes, [&](std::size_t n) {
        const auto start = std::chrono::steady_clock::now();
        outcomes[n] = run_episode(policy, cfg, stream_seed(seed, n));
        seconds[n] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    });

    SuccessReport r;
    r.episodes = episodes;
    double distance = 0.0, ret = 0.0, wall = 0.0;
    std::size_t steps = 0;
    for (std::size_t n = 0; n < episodes; ++n) {
        const auto& o = outcomes[n];
        r.successes += o.success ? 1 : 0;
        r.aborted += o.aborted ? 1 : 0;
        distance += o.final_distance;
        ret += o.total_return;
        wall += seconds[n];
        steps += static_cast<std::size_t>(std::max(o.steps, 1));
    }
    const double n = static_cast<double>(episodes);
    r.success_rate = static_cast<double>(r.successes) / n;
    r.mean_final_distance = distance / n;
    r.mean_return = ret / n;
    r.mean_step_time = wall / static_cast<double>(steps);
    return r;
}

void TrainerConfig::validate() const {
    if (hidden.empty()) throw std::invalid_argument("at least one hidden layer is required");
    for (int h : hidden) {
        if (h < 1) throw std::invalid_argument("hidden layer widths must be positive");
    }
    if (population < 2) throw std::invalid_argument("population must be at least 2");
    if (elites < 1 || elites >= population) throw std::invalid_argument("elites must lie in [1, population)");
    if (generations < 0) throw std::invalid_argument("generations must be non-negative");
    if (episodes_per_candidate < 1) throw std::invalid_argument("episodes per candidate must be positive");
    if (validation_episodes < 1) throw std::invalid_argument("validation episodes must be positive");
    if (!(init_std > 0 && min_std > 0 && init_scale > 0)) throw std::invalid_argument("scales must be positive");
}

namespace {

double mean_return(const Policy& policy, const ReacherConfig& env, std::uint64_t master, int episodes) {
    double total = 0.0;
    for (int n = 0; n < episodes; ++n) {
        total += run_episode(policy, env, stream_seed(master, static_cast<std::uint64_t>(n))).total_return;
    }
    return total / episodes;
}

struct Candidate {
    std::vector<double> params;
    double score = 0.0;
};

}  // namespace

TrainResult train_cem(const ReacherConfig& env, const TrainerConfig& trainer, std::uint64_t seed) {
    env.validate();
    trainer.validate();

    std::vector<int> layers{11};
    layers.insert(layers.end(), trainer.hidden.begin(), trainer.hidden.end());
    layers.push_back(2);
    const double limit = env.arm.torque_limit;

    const std::uint64_t train_master = stream_seed(seed, 1);
    const std::uint64_t val_master = stream_seed(seed, 2);
    Rng rng(stream_seed(seed, 3));

    const MlpPolicy initial = MlpPolicy::random_init(layers, limit, stream_seed(seed, 0), trainer.init_scale);
    auto validation_score = [&](const std::vector<double>& params) {
        return evaluate_policy(MlpPolicy(layers, limit, params), static_cast<std::size_t>(trainer.validation_episodes),
                               env, val_master)
            .mean_return;
    };

    TrainResult result{initial, initial, {}, 0.0, 0.0, -1};
    result.initial_validation_return = validation_score(initial.params());
    result.best_validation_return = result.initial_validation_return;

    const std::size_t dim = initial.params().size();
    std::vector<double> mean = initial.params();
    std::vector<double> sd(dim, trainer.init_std);
    std::vector<Candidate> elites;

    for (int g = 0; g < trainer.generations; ++g) {
        std::vector<Candidate> pool;
        if (trainer.keep_elites) pool = elites;
        const std::size_t carried = pool.size();
        while (pool.size() < static_cast<std::size_t>(trainer.population)) {
            Candidate c;
            c.params.resize(dim);
            for (std::size_t d = 0; d < dim; ++d) c.params[d] = mean[d] + sd[d] * rng.normal();
            pool.push_back(std::move(c));
        }
        parallel_for(pool.size() - carried, [&](std::size_t n) {
            auto& c = pool[carried + n];
            c.score = mean_return(MlpPolicy(layers, limit, c.params), env, train_master, trainer.episodes_per_candidate);
        });

        std::vector<std::size_t> order(pool.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return pool[a].score > pool[b].score; });

        TrainLogRow row;
        row.generation = g;
        for (const auto& c : pool) row.mean_return += c.score;
        row.mean_return /= static_cast<double>(pool.size());
        row.best_return = pool[order.front()].score;

        elites.clear();
        for (int e = 0; e < trainer.elites; ++e) elites.push_back(pool[order[static_cast<std::size_t>(e)]]);
        for (const auto& c : elites) row.elite_mean_return += c.score;
        row.elite_mean_return /= static_cast<double>(elites.size());

        for (std::size_t d = 0; d < dim; ++d) {
            double m = 0.0;
            for (const auto& c : elites) m += c.params[d];
            m /= static_cast<double>(elites.size());
            double v = 0.0;
            for (const auto& c : elites) v += (c.params[d] - m) * (c.params[d] - m);
            v /= static_cast<double>(elites.size());
            mean[d] = m;
            sd[d] = std::max(std::sqrt(v), trainer.min_std);
        }

        row.validation_return = validation_score(mean);
        if (row.validation_return > result.best_validation_return) {
            result.best_validation_return = row.validation_return;
            result.best_generation = g;
            result.policy = MlpPolicy(layers, limit, mean);
        }
        result.log.push_back(row);
    }
    return result;
}

std::string training_log_csv(const std::vector<TrainLogRow>& log) {
    std::string out = "generation,mean_return,elite_mean_return,best_return,validation_return\n";
    char buf[160];
    for (const auto& r : log) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g\n", r.generation, r.mean_return,
                      r.elite_mean_return, r.best_return, r.validation_return);
        out += buf;
    }
    return out;
}

SorterCoupling success_to_sorter(double success_rate, double item_mass, double items_per_hour,
                                 const std::string& material) {
    if (!(item_mass > 0)) throw std::invalid_argument("item mass must be positive");
    if (!(items_per_hour > 0)) throw std::invalid_argument("item rate must be positive");
    if (!(success_rate >= 0 && success_rate <= 1)) throw std::invalid_argument("success rate must lie in [0, 1]");
    SorterCoupling c;
    c.sorter.material = material;
    c.sorter.success_rate = success_rate;
    c.sorter.item_mass = item_mass;
    c.sorter.item_rate = items_per_hour;
    c.sorter.throughput = throughput_from_items(items_per_hour, item_mass);
    const double daily = items_per_hour * item_mass * 24.0;
    c.sorted_per_day = success_rate * daily;
    c.rejected_per_day = daily - c.sorted_per_day;
    return c;
}

}  // namespace circuflow::robot

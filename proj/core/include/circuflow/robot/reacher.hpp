#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "circuflow/robot/manipulator.hpp"
#include "circuflow/robot/random.hpp"

namespace circuflow::robot {

using Observation = std::array<double, 11>;

struct EpisodeCriterion {
    double distance_threshold = 0.04;  // m
    double torque_threshold = 0.005;   // N m, each joint
    int max_steps = 50;
    double dt = 0.02;  // control step, s
    int window = 1;    // consecutive steps both thresholds must hold

    bool valid() const { return distance_threshold > 0 && torque_threshold > 0 && max_steps > 0 && dt > 0 && window >= 1; }
};

struct ReacherConfig {
    ManipulatorParams arm;
    EpisodeCriterion criterion;
    int substeps = 2;           // physics substeps per control step
    double action_cost = 16.0;  // c_a in reward = -|delta| - c_a |tau|^2
    double spawn_radius = 0.16;
    double spawn_min_radius = 0.01;
    Vec2 initial_q{0.0, M_PI / 2};

    double physics_dt() const { return criterion.dt / substeps; }
    void validate() const;  // throws std::invalid_argument
};

/// [cos q1, cos q2, sin q1, sin q2, target x, target y, qd1, qd2, dx, dy, 0]
/// with d = fingertip - target.
Observation observe(const ManipulatorState& s, const ManipulatorParams& p);

double tip_distance(const ManipulatorState& s, const ManipulatorParams& p);

/// Initial arm pose at rest and a target uniform on the spawn disk about the
/// base, redrawn while it falls inside `spawn_min_radius`.
ManipulatorState reset_episode(const ReacherConfig& cfg, Rng& rng);

Vec2 clip_torque(const Vec2& tau, double limit);

struct EnvStep {
    ManipulatorState state;
    double reward = 0.0;
    bool terminal = false;
    bool aborted = false;  // non-finite state
};

/// One control step: the torque (clipped to the actuator bound) is held over
/// `substeps` semi-implicit Euler substeps. The reward is scored on the state
/// the action was chosen from. Throws std::invalid_argument on a non-finite action.
EnvStep step_env(const ManipulatorState& s, const Vec2& tau, const ReacherConfig& cfg);

}  // namespace circuflow::robot

#include "circuflow/robot/reacher.hpp"

#include <algorithm>
#include <stdexcept>

namespace circuflow::robot {

void ReacherConfig::validate() const {
    if (!arm.valid()) throw std::invalid_argument("invalid manipulator parameters");
    if (!criterion.valid()) throw std::invalid_argument("invalid episode criterion");
    if (substeps < 1) throw std::invalid_argument("substeps must be at least 1");
    if (!(action_cost >= 0)) throw std::invalid_argument("action cost must be non-negative");
    if (!(spawn_radius > spawn_min_radius && spawn_min_radius >= 0)) {
        throw std::invalid_argument("spawn radii must satisfy 0 <= min < max");
    }
    if (spawn_radius > arm.l1 + arm.l2) throw std::invalid_argument("spawn disk exceeds the reachable workspace");
}

Observation observe(const ManipulatorState& s, const ManipulatorParams& p) {
    const Vec2 tip = fingertip(s.q, p);
    return {std::cos(s.q[0]), std::cos(s.q[1]), std::sin(s.q[0]), std::sin(s.q[1]), s.target[0], s.target[1],
            s.qd[0],          s.qd[1],          tip[0] - s.target[0], tip[1] - s.target[1], 0.0};
}

double tip_distance(const ManipulatorState& s, const ManipulatorParams& p) {
    const Vec2 tip = fingertip(s.q, p);
    return std::hypot(tip[0] - s.target[0], tip[1] - s.target[1]);
}

ManipulatorState reset_episode(const ReacherConfig& cfg, Rng& rng) {
    ManipulatorState s;
    s.q = cfg.initial_q;
    s.qd = {0.0, 0.0};
    s.t = 0.0;
    const double r_max = cfg.spawn_radius;
    for (;;) {
        const double x = rng.uniform(-r_max, r_max);
        const double y = rng.uniform(-r_max, r_max);
        const double r = std::hypot(x, y);
        if (r < r_max && r >= cfg.spawn_min_radius) {
            s.target = {x, y};
            return s;
        }
    }
}

Vec2 clip_torque(const Vec2& tau, double limit) {
    return {std::clamp(tau[0], -limit, limit), std::clamp(tau[1], -limit, limit)};
}

EnvStep step_env(const ManipulatorState& s, const Vec2& action, const ReacherConfig& cfg) {
    if (!std::isfinite(action[0]) || !std::isfinite(action[1])) throw std::invalid_argument("action is not finite");
    const Vec2 tau = clip_torque(action, cfg.arm.torque_limit);

    EnvStep out;
    out.reward = -tip_distance(s, cfg.arm) - cfg.action_cost * (tau[0] * tau[0] + tau[1] * tau[1]);
    out.state = s;
    const double h = cfg.physics_dt();
    for (int n = 0; n < cfg.substeps; ++n) {
        const Vec2 qdd = forward_dynamics(out.state, tau, cfg.arm);
        out.state.qd[0] += h * qdd[0];
        out.state.qd[1] += h * qdd[1];
        out.state.q[0] += h * out.state.qd[0];
        out.state.q[1] += h * out.state.qd[1];
    }
    const long step = std::lround(s.t / cfg.criterion.dt) + 1;
    out.state.t = static_cast<double>(step) * cfg.criterion.dt;
    out.terminal = step >= cfg.criterion.max_steps;
    for (double v : {out.state.q[0], out.state.q[1], out.state.qd[0], out.state.qd[1]}) {
        if (!std::isfinite(v)) {
            out.aborted = true;
            out.terminal = true;
        }
    }
    return out;
}

}  // namespace circuflow::robot

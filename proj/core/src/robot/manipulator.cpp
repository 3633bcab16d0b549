#include "circuflow/robot/manipulator.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace circuflow::robot {

namespace {

// M(q) = [[alpha + 2 beta cos q2, delta + beta cos q2], [delta + beta cos q2, delta]]
struct InertiaConstants {
    double alpha;
    double beta;
    double delta;
    double lc1;  // distance of each link's mass centre from its joint
    double lc2;
};

InertiaConstants constants(const ManipulatorParams& p) {
    if (p.inertia == InertiaModel::PointMassTip) {
        return {p.m1 * p.l1 * p.l1 + p.m2 * (p.l1 * p.l1 + p.l2 * p.l2), p.m2 * p.l1 * p.l2, p.m2 * p.l2 * p.l2, p.l1,
                p.l2};
    }
    const double lc1 = p.l1 / 2, lc2 = p.l2 / 2;
    const double i1 = p.m1 * p.l1 * p.l1 / 12.0, i2 = p.m2 * p.l2 * p.l2 / 12.0;
    return {p.m1 * lc1 * lc1 + i1 + p.m2 * (p.l1 * p.l1 + lc2 * lc2) + i2, p.m2 * p.l1 * lc2, p.m2 * lc2 * lc2 + i2,
            lc1, lc2};
}

}  // namespace

Vec2 Mat2::solve(const Vec2& rhs) const {
    const double det = determinant();
    assert(det != 0.0);
    return {(a22 * rhs[0] - a12 * rhs[1]) / det, (a11 * rhs[1] - a21 * rhs[0]) / det};
}

bool ManipulatorParams::valid() const {
    return l1 > 0 && l2 > 0 && m1 > 0 && m2 > 0 && b1 >= 0 && b2 >= 0 && torque_limit > 0 && std::isfinite(gravity);
}

Mat2 mass_matrix(const Vec2& q, const ManipulatorParams& p) {
    const auto k = constants(p);
    const double c2 = std::cos(q[1]);
    const double off = k.delta + k.beta * c2;
    return {k.alpha + 2.0 * k.beta * c2, off, off, k.delta};
}

Mat2 coriolis_matrix(const Vec2& q, const Vec2& qd, const ManipulatorParams& p) {
    const double h = -constants(p).beta * std::sin(q[1]);
    return {h * qd[1], h * (qd[0] + qd[1]), -h * qd[0], 0.0};
}

Vec2 gravity_torque(const Vec2& q, const ManipulatorParams& p) {
    const auto k = constants(p);
    const double c1 = std::cos(q[0]);
    const double c12 = std::cos(q[0] + q[1]);
    const double g2 = p.m2 * k.lc2 * p.gravity * c12;
    return {(p.m1 * k.lc1 + p.m2 * p.l1) * p.gravity * c1 + g2, g2};
}

Vec2 forward_dynamics(const ManipulatorState& s, const Vec2& tau, const ManipulatorParams& p) {
    const double bound = p.torque_limit * (1.0 + 1e-12);
    if (std::abs(tau[0]) > bound || std::abs(tau[1]) > bound) {
        throw std::invalid_argument("joint torque exceeds the actuator bound");
    }
    const Mat2 m = mass_matrix(s.q, p);
    const Vec2 cqd = coriolis_matrix(s.q, s.qd, p) * s.qd;
    const Vec2 g = gravity_torque(s.q, p);
    const Vec2 rhs = {tau[0] - cqd[0] - g[0] - p.b1 * s.qd[0], tau[1] - cqd[1] - g[1] - p.b2 * s.qd[1]};
    return m.solve(rhs);
}

Vec2 fingertip(const Vec2& q, const ManipulatorParams& p) {
    const double q12 = q[0] + q[1];
    return {p.l1 * std::cos(q[0]) + p.l2 * std::cos(q12), p.l1 * std::sin(q[0]) + p.l2 * std::sin(q12)};
}

double kinetic_energy(const ManipulatorState& s, const ManipulatorParams& p) {
    const Vec2 mqd = mass_matrix(s.q, p) * s.qd;
    return 0.5 * (s.qd[0] * mqd[0] + s.qd[1] * mqd[1]);
}

double potential_energy(const Vec2& q, const ManipulatorParams& p) {
    const auto k = constants(p);
    return p.gravity * ((p.m1 * k.lc1 + p.m2 * p.l1) * std::sin(q[0]) + p.m2 * k.lc2 * std::sin(q[0] + q[1]));
}

EnergyTrace integrate_with_energy(const ManipulatorState& start, const TorqueLaw& torque, const ManipulatorParams& p,
                                  double dt, double duration) {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    // Augmented state: q1, q2, qd1, qd2, net work.
    using X = std::array<double, 5>;
    auto field = [&](double t, const X& x) {
        const Vec2 q{x[0], x[1]}, qd{x[2], x[3]};
        const Vec2 tau = torque ? torque(t, q, qd) : Vec2{0.0, 0.0};
        ManipulatorState s;
        s.q = q;
        s.qd = qd;
        const Vec2 qdd = forward_dynamics(s, tau, p);
        const double power = tau[0] * qd[0] + tau[1] * qd[1] - p.b1 * qd[0] * qd[0] - p.b2 * qd[1] * qd[1];
        return X{qd[0], qd[1], qdd[0], qdd[1], power};
    };
    auto add = [](const X& x, double a, const X& k) {
        X out;
        for (std::size_t n = 0; n < x.size(); ++n) out[n] = x[n] + a * k[n];
        return out;
    };

    EnergyTrace trace;
    X x{start.q[0], start.q[1], start.qd[0], start.qd[1], 0.0};
    ManipulatorState s = start;
    const auto steps = static_cast<std::size_t>(std::llround(duration / dt));
    double t = start.t;
    for (std::size_t n = 0;; ++n) {
        s.q = {x[0], x[1]};
        s.qd = {x[2], x[3]};
        s.t = t;
        trace.times.push_back(t);
        trace.energy.push_back(total_energy(s, p));
        trace.net_work.push_back(x[4]);
        if (n == steps) break;
        const X k1 = field(t, x);
        const X k2 = field(t + dt / 2, add(x, dt / 2, k1));
        const X k3 = field(t + dt / 2, add(x, dt / 2, k2));
        const X k4 = field(t + dt, add(x, dt, k3));
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        t = start.t + static_cast<double>(n + 1) * dt;
    }
    trace.final_state = s;
    return trace;
}

}  // namespace circuflow::robot

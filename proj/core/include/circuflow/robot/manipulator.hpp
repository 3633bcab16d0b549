#pragma once

#include <array>
#include <functional>
#include <vector>

namespace circuflow::robot {

using Vec2 = std::array<double, 2>;

/// Row-major 2x2 matrix.
struct Mat2 {
    double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;

    Vec2 operator*(const Vec2& v) const { return {a11 * v[0] + a12 * v[1], a21 * v[0] + a22 * v[1]}; }
    Mat2 transposed() const { return {a11, a21, a12, a22}; }
    double determinant() const { return a11 * a22 - a12 * a21; }
    Vec2 solve(const Vec2& rhs) const;
};

enum class InertiaModel { PointMassTip, UniformRod };

/// Two-link revolute-revolute planar arm. Gravity acts along -y of the base
/// frame; 0 gives the horizontal-plane task.
struct ManipulatorParams {
    double l1 = 0.1;  // m
    double l2 = 0.1;
    double m1 = 0.05;  // kg
    double m2 = 0.05;
    InertiaModel inertia = InertiaModel::PointMassTip;
    double gravity = 0.0;        // m/s^2
    double b1 = 0.001;           // viscous friction, N m s
    double b2 = 0.001;
    double torque_limit = 0.05;  // N m, per joint

    bool valid() const;
};

struct ManipulatorState {
    Vec2 q{};       // joint angles, rad
    Vec2 qd{};      // joint velocities, rad/s
    Vec2 target{};  // m, base frame
    double t = 0.0;
};

/// Symmetric positive definite inertia matrix M(q).
Mat2 mass_matrix(const Vec2& q, const ManipulatorParams& p);

/// Coriolis/centrifugal matrix with dM/dt - 2C skew-symmetric.
Mat2 coriolis_matrix(const Vec2& q, const Vec2& qd, const ManipulatorParams& p);

Vec2 gravity_torque(const Vec2& q, const ManipulatorParams& p);

/// qdd = M^-1 (tau - C qd - g - B qd). Throws std::invalid_argument when a
/// torque exceeds the actuator bound.
Vec2 forward_dynamics(const ManipulatorState& s, const Vec2& tau, const ManipulatorParams& p);

Vec2 fingertip(const Vec2& q, const ManipulatorParams& p);

double kinetic_energy(const ManipulatorState& s, const ManipulatorParams& p);
double potential_energy(const Vec2& q, const ManipulatorParams& p);
inline double total_energy(const ManipulatorState& s, const ManipulatorParams& p) {
    return kinetic_energy(s, p) + potential_energy(s.q, p);
}

using TorqueLaw = std::function<Vec2(double t, const Vec2& q, const Vec2& qd)>;

/// Energy bookkeeping along an RK4-integrated trajectory. `net_work` integrates
/// tau.qd - qd.B.qd with the same stages as the state, so
/// energy[n] - energy[0] - net_work[n] measures the passivity residual.
struct EnergyTrace {
    std::vector<double> times;
    std::vector<double> energy;
    std::vector<double> net_work;
    ManipulatorState final_state;
};

/// An empty torque law applies zero torque.
EnergyTrace integrate_with_energy(const ManipulatorState& start, const TorqueLaw& torque, const ManipulatorParams& p,
                                  double dt, double duration);

}  // namespace circuflow::robot

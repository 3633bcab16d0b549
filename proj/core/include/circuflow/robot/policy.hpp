#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "circuflow/robot/reacher.hpp"

namespace circuflow::robot {

/// Pure map from observation to joint torques. Outputs are clipped to the
/// actuator bound by the caller.
class Policy {
public:
    virtual ~Policy() = default;
    virtual Vec2 act(const Observation& obs) const = 0;
    virtual std::string name() const = 0;
};

class ZeroPolicy final : public Policy {
public:
    Vec2 act(const Observation&) const override { return {0.0, 0.0}; }
    std::string name() const override { return "zero"; }
};

/// Inverse-kinematics servo: computed-torque PD on the joint-space target
/// (critically damped at `natural_frequency`), with torques scaled down
/// linearly once the fingertip is within `fade_radius` of the target.
class ServoPolicy final : public Policy {
public:
    explicit ServoPolicy(ManipulatorParams arm, double natural_frequency = 12.0, double fade_radius = 0.01);
    Vec2 act(const Observation& obs) const override;
    std::string name() const override { return "servo"; }

private:
    ManipulatorParams arm_;
    double omega_;
    double fade_radius_;
};

/// Feed-forward tanh network, 11 inputs, 2 outputs scaled by the torque limit.
/// Parameters are stored layer by layer: weights row-major (out x in), then biases.
class MlpPolicy final : public Policy {
public:
    MlpPolicy(std::vector<int> layers, double torque_limit, std::vector<double> params);

    static std::size_t param_count(const std::vector<int>& layers);
    /// Weights ~ N(0, scale^2 / fan_in), biases zero.
    static MlpPolicy random_init(const std::vector<int>& layers, double torque_limit, std::uint64_t seed,
                                 double scale = 1.0);

    Vec2 act(const Observation& obs) const override;
    std::string name() const override { return "mlp"; }

    const std::vector<int>& layers() const { return layers_; }
    const std::vector<double>& params() const { return params_; }
    double torque_limit() const { return torque_limit_; }

    std::string to_json() const;
    static MlpPolicy from_json(const std::string& text);  // throws LoadError
    void save(const std::string& path) const;
    static MlpPolicy load(const std::string& path);

private:
    std::vector<int> layers_;
    double torque_limit_;
    std::vector<double> params_;
};

/// "zero", "servo", or a policy file path.
std::unique_ptr<Policy> make_policy(const std::string& spec, const ManipulatorParams& arm);

}  // namespace circuflow::robot

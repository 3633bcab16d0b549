#include "circuflow/robot/policy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "circuflow/errors.hpp"
#include "circuflow/network_io.hpp"
#include "circuflow/robot/random.hpp"

namespace circuflow::robot {

namespace {

double wrap(double a) { return std::remainder(a, 2.0 * M_PI); }

}  // namespace

ServoPolicy::ServoPolicy(ManipulatorParams arm, double natural_frequency, double fade_radius)
    : arm_(arm), omega_(natural_frequency), fade_radius_(fade_radius) {
    if (!(natural_frequency > 0)) throw std::invalid_argument("natural frequency must be positive");
    if (!(fade_radius >= 0)) throw std::invalid_argument("fade radius must be non-negative");
}

Vec2 ServoPolicy::act(const Observation& obs) const {
    const Vec2 q{std::atan2(obs[2], obs[0]), std::atan2(obs[3], obs[1])};
    const Vec2 qd{obs[6], obs[7]};
    const double tx = obs[4], ty = obs[5];

    const double l1 = arm_.l1, l2 = arm_.l2;
    const double c2 = std::clamp((tx * tx + ty * ty - l1 * l1 - l2 * l2) / (2.0 * l1 * l2), -1.0, 1.0);
    const double base = std::atan2(ty, tx);
    Vec2 goal{};
    double best = INFINITY;
    for (double sign : {1.0, -1.0}) {
        const double q2 = sign * std::acos(c2);
        const double q1 = base - std::atan2(l2 * std::sin(q2), l1 + l2 * std::cos(q2));
        const Vec2 err{wrap(q1 - q[0]), wrap(q2 - q[1])};
        const double cost = err[0] * err[0] + err[1] * err[1];
        if (cost < best) {
            best = cost;
            goal = err;
        }
    }

    const Vec2 accel{omega_ * omega_ * goal[0] - 2.0 * omega_ * qd[0], omega_ * omega_ * goal[1] - 2.0 * omega_ * qd[1]};
    const Vec2 ma = mass_matrix(q, arm_) * accel;
    const Vec2 cqd = coriolis_matrix(q, qd, arm_) * qd;
    const Vec2 g = gravity_torque(q, arm_);
    Vec2 tau{ma[0] + cqd[0] + g[0] + arm_.b1 * qd[0], ma[1] + cqd[1] + g[1] + arm_.b2 * qd[1]};

    const double d = std::hypot(obs[8], obs[9]);
    if (fade_radius_ > 0 && d < fade_radius_) {
        tau[0] *= d / fade_radius_;
        tau[1] *= d / fade_radius_;
    }
    return clip_torque(tau, arm_.torque_limit);
}

std::size_t MlpPolicy::param_count(const std::vector<int>& layers) {
    std::size_t n = 0;
    for (std::size_t l = 1; l < layers.size(); ++l) {
        n += static_cast<std::size_t>(layers[l]) * static_cast<std::size_t>(layers[l - 1] + 1);
    }
    return n;
}

MlpPolicy::MlpPolicy(std::vector<int> layers, double torque_limit, std::vector<double> params)
    : layers_(std::move(layers)), torque_limit_(torque_limit), params_(std::move(params)) {
    if (layers_.size() < 2 || layers_.front() != 11 || layers_.back() != 2) {
        throw std::invalid_argument("policy layers must start at 11 inputs and end at 2 outputs");
    }
    for (int w : layers_) {
        if (w < 1) throw std::invalid_argument("policy layer widths must be positive");
    }
    if (!(torque_limit_ > 0)) throw std::invalid_argument("torque limit must be positive");
    if (params_.size() != param_count(layers_)) {
        throw std::invalid_argument("policy has " + std::to_string(params_.size()) + " parameters, layers need " +
                                    std::to_string(param_count(layers_)));
    }
}

MlpPolicy MlpPolicy::random_init(const std::vector<int>& layers, double torque_limit, std::uint64_t seed,
                                 double scale) {
    Rng rng(seed);
    std::vector<double> params;
    params.reserve(param_count(layers));
    for (std::size_t l = 1; l < layers.size(); ++l) {
        const double sd = scale / std::sqrt(static_cast<double>(layers[l - 1]));
        for (int n = 0; n < layers[l] * layers[l - 1]; ++n) params.push_back(sd * rng.normal());
        for (int n = 0; n < layers[l]; ++n) params.push_back(0.0);
    }
    return MlpPolicy(layers, torque_limit, std::move(params));
}

Vec2 MlpPolicy::act(const Observation& obs) const {
    std::vector<double> x(obs.begin(), obs.end());
    std::vector<double> y;
    const double* p = params_.data();
    for (std::size_t l = 1; l < layers_.size(); ++l) {
        const int in = layers_[l - 1], out = layers_[l];
        y.assign(out, 0.0);
        for (int o = 0; o < out; ++o) {
            double acc = 0.0;
            for (int i = 0; i < in; ++i) acc += p[o * in + i] * x[i];
            y[o] = acc;
        }
        p += out * in;
        for (int o = 0; o < out; ++o) y[o] = std::tanh(y[o] + p[o]);
        p += out;
        x.swap(y);
    }
    return clip_torque({torque_limit_ * x[0], torque_limit_ * x[1]}, torque_limit_);
}

std::string MlpPolicy::to_json() const {
    nlohmann::json j;
    j["format"] = "circuflow-policy";
    j["version"] = 1;
    j["layers"] = layers_;
    j["activation"] = "tanh";
    j["torque_limit"] = torque_limit_;
    j["params"] = params_;
    return j.dump(1);
}

MlpPolicy MlpPolicy::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw LoadError("policy file is not valid JSON", {e.what()});
    }
    std::vector<std::string> problems;
    if (!j.is_object()) throw LoadError("policy file must hold a JSON object", {"$: expected object"});
    if (j.value("format", "") != "circuflow-policy") problems.push_back("$.format: expected 'circuflow-policy'");
    if (!j.contains("version") || !j["version"].is_number_integer() || j["version"].get<int>() != 1) {
        problems.push_back("$.version: unsupported version (expected 1)");
    }
    if (j.value("activation", "") != "tanh") problems.push_back("$.activation: only 'tanh' is supported");
    if (!j.contains("layers") || !j["layers"].is_array()) problems.push_back("$.layers: expected array of integers");
    if (!j.contains("torque_limit") || !j["torque_limit"].is_number()) problems.push_back("$.torque_limit: expected number");
    if (!j.contains("params") || !j["params"].is_array()) problems.push_back("$.params: expected array of numbers");
    if (!problems.empty()) throw LoadError("policy file has schema errors", problems);
    try {
        return MlpPolicy(j["layers"].get<std::vector<int>>(), j["torque_limit"].get<double>(),
                         j["params"].get<std::vector<double>>());
    } catch (const nlohmann::json::exception& e) {
        throw LoadError("policy file has schema errors", {e.what()});
    } catch (const std::invalid_argument& e) {
        throw LoadError("policy file is inconsistent", {e.what()});
    }
}

void MlpPolicy::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << to_json() << '\n';
}

MlpPolicy MlpPolicy::load(const std::string& path) { return from_json(read_text_file(path)); }

std::unique_ptr<Policy> make_policy(const std::string& spec, const ManipulatorParams& arm) {
    if (spec == "zero") return std::make_unique<ZeroPolicy>();
    if (spec == "servo") return std::make_unique<ServoPolicy>(arm);
    return std::make_unique<MlpPolicy>(MlpPolicy::load(spec));
}

}  // namespace circuflow::robot

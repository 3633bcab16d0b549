#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <set>
#include <stdexcept>

#include "circuflow/errors.hpp"
#include "circuflow/robot/manipulator.hpp"
#include "circuflow/robot/policy.hpp"
#include "circuflow/robot/random.hpp"
#include "circuflow/robot/reacher.hpp"
#include "circuflow/robot/training.hpp"
#include "oracles.hpp"

using namespace circuflow;
using namespace circuflow::robot;

namespace {

// Kinetic energy of point masses at the elbow and tip, from finite-difference link velocities.
double point_mass_kinetic(const Vec2& q, const Vec2& qd, const ManipulatorParams& p) {
    const double h = 1e-6;
    auto elbow = [&](const Vec2& a) { return oracle::fingertip(a[0], 0.0, p.l1, 0.0); };
    auto tip = [&](const Vec2& a) { return oracle::fingertip(a[0], a[1], p.l1, p.l2); };
    const Vec2 fwd{q[0] + h * qd[0], q[1] + h * qd[1]};
    const Vec2 bwd{q[0] - h * qd[0], q[1] - h * qd[1]};
    auto speed2 = [&](auto f) {
        const auto a = f(fwd), b = f(bwd);
        const double vx = (a[0] - b[0]) / (2 * h), vy = (a[1] - b[1]) / (2 * h);
        return vx * vx + vy * vy;
    };
    return 0.5 * p.m1 * speed2(elbow) + 0.5 * p.m2 * speed2(tip);
}

ReacherConfig quick_env() { return ReacherConfig{}; }

}  // namespace

TEST_SUITE("robot") {

TEST_CASE("forward kinematics matches composed transforms") {
    ManipulatorParams p;
    p.l1 = 0.13;
    p.l2 = 0.07;
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> ang(-M_PI, M_PI);
    for (int n = 0; n < 1000; ++n) {
        const Vec2 q{ang(gen), ang(gen)};
        const auto tip = fingertip(q, p);
        const auto ref = oracle::fingertip(q[0], q[1], p.l1, p.l2);
        CHECK(std::abs(tip[0] - ref[0]) <= 1e-15);
        CHECK(std::abs(tip[1] - ref[1]) <= 1e-15);
    }
    const auto home = fingertip({0.0, M_PI / 2}, ManipulatorParams{});
    CHECK(home[0] == doctest::Approx(0.1));
    CHECK(home[1] == doctest::Approx(0.1));
}

TEST_CASE("mass matrix is symmetric positive definite and matches point-mass kinetic energy") {
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> ang(-M_PI, M_PI), vel(-5.0, 5.0);
    for (auto model : {InertiaModel::PointMassTip, InertiaModel::UniformRod}) {
        ManipulatorParams p;
        p.inertia = model;
        for (int n = 0; n < 500; ++n) {
            const Vec2 q{ang(gen), ang(gen)};
            const Mat2 m = mass_matrix(q, p);
            CHECK(m.a12 == m.a21);
            CHECK(oracle::min_eigenvalue(m.a11, m.a12, m.a22) > 0.0);
            if (model == InertiaModel::PointMassTip) {
                const Vec2 qd{vel(gen), vel(gen)};
                const double ke = kinetic_energy({q, qd, {}, 0.0}, p);
                CHECK(ke == doctest::Approx(point_mass_kinetic(q, qd, p)).epsilon(1e-7));
            }
        }
    }
}

TEST_CASE("dM/dt - 2C is skew-symmetric") {
    ManipulatorParams p;
    std::mt19937_64 gen(21);
    std::uniform_real_distribution<double> ang(-M_PI, M_PI), vel(-5.0, 5.0);
    for (auto model : {InertiaModel::PointMassTip, InertiaModel::UniformRod}) {
        p.inertia = model;
        for (int n = 0; n < 200; ++n) {
            const Vec2 q{ang(gen), ang(gen)}, qd{vel(gen), vel(gen)};
            const double h = 1e-6;
            const Mat2 mp = mass_matrix({q[0] + h * qd[0], q[1] + h * qd[1]}, p);
            const Mat2 mm = mass_matrix({q[0] - h * qd[0], q[1] - h * qd[1]}, p);
            const Mat2 c = coriolis_matrix(q, qd, p);
            const double n11 = (mp.a11 - mm.a11) / (2 * h) - 2 * c.a11;
            const double n12 = (mp.a12 - mm.a12) / (2 * h) - 2 * c.a12;
            const double n21 = (mp.a21 - mm.a21) / (2 * h) - 2 * c.a21;
            const double n22 = (mp.a22 - mm.a22) / (2 * h) - 2 * c.a22;
            CHECK(std::abs(n11) <= 1e-8);
            CHECK(std::abs(n22) <= 1e-8);
            CHECK(std::abs(n12 + n21) <= 1e-8);
        }
    }
}

TEST_CASE("energy balance along RK4 trajectories") {
    SUBCASE("unforced arm with friction loses energy") {
        ManipulatorParams p;
        const auto trace = integrate_with_energy({{0.3, -1.0}, {4.0, -3.0}, {}, 0.0}, {}, p, 1e-3, 2.0);
        for (std::size_t i = 1; i < trace.energy.size(); ++i) CHECK(trace.energy[i] <= trace.energy[i - 1] + 1e-15);
    }
    SUBCASE("work integral closes the balance under gravity and torque") {
        for (auto model : {InertiaModel::PointMassTip, InertiaModel::UniformRod}) {
            ManipulatorParams p;
            p.inertia = model;
            p.gravity = 9.81;
            const TorqueLaw law = [](double t, const Vec2&, const Vec2& qd) {
                return Vec2{0.03 * std::sin(3 * t) - 0.001 * qd[0], 0.02 * std::cos(5 * t)};
            };
            const auto trace = integrate_with_energy({{0.2, 0.4}, {0.0, 1.0}, {}, 0.0}, law, p, 1e-4, 1.0);
            double scale = 0.0;
            for (double e : trace.energy) scale = std::max(scale, std::abs(e));
            for (std::size_t i = 0; i < trace.energy.size(); ++i) {
                CHECK(std::abs(trace.energy[i] - trace.energy[0] - trace.net_work[i]) <= 1e-9 * scale);
            }
        }
    }
}

TEST_CASE("torques beyond the actuator bound are refused") {
    ManipulatorParams p;
    const ManipulatorState s{{0.0, 1.0}, {0.0, 0.0}, {}, 0.0};
    CHECK_NOTHROW(forward_dynamics(s, {p.torque_limit, -p.torque_limit}, p));
    CHECK_THROWS_AS(forward_dynamics(s, {0.051, 0.0}, p), std::invalid_argument);
    CHECK(clip_torque({1.0, -1.0}, 0.05) == Vec2{0.05, -0.05});
}

TEST_CASE("random streams") {
    std::set<std::uint64_t> seeds;
    for (std::uint64_t n = 0; n < 1000; ++n) seeds.insert(stream_seed(7, n));
    CHECK(seeds.size() == 1000);
    CHECK(stream_seed(7, 3) == stream_seed(7, 3));
    CHECK(stream_seed(7, 3) != stream_seed(8, 3));

    Rng rng(1);
    double sum = 0.0, sum2 = 0.0, usum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        sum += z;
        sum2 += z * z;
        const double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        usum += u;
    }
    CHECK(std::abs(sum / n) < 0.01);
    CHECK(std::abs(sum2 / n - 1.0) < 0.02);
    CHECK(std::abs(usum / n - 0.5) < 0.005);
}

TEST_CASE("episode reset") {
    const auto cfg = quick_env();
    Rng rng(3);
    for (int n = 0; n < 5000; ++n) {
        const auto s = reset_episode(cfg, rng);
        CHECK(s.q == cfg.initial_q);
        CHECK(s.qd == Vec2{0.0, 0.0});
        const double r = std::hypot(s.target[0], s.target[1]);
        CHECK(r < 0.16);
        CHECK(r >= 0.01);
    }
}

TEST_CASE("observation layout and step semantics") {
    const auto cfg = quick_env();
    const ManipulatorState s{{0.0, M_PI / 2}, {0.0, 0.0}, {0.05, -0.02}, 0.0};
    const auto obs = observe(s, cfg.arm);
    CHECK(obs[0] == 1.0);
    CHECK(obs[3] == 1.0);
    CHECK(obs[4] == 0.05);
    CHECK(obs[5] == -0.02);
    CHECK(obs[8] == doctest::Approx(0.05));
    CHECK(obs[9] == doctest::Approx(0.12));
    CHECK(obs[10] == 0.0);

    const auto st = step_env(s, {0.01, -0.02}, cfg);
    CHECK(st.reward == doctest::Approx(-std::hypot(0.05, 0.12) - 16.0 * (1e-4 + 4e-4)));
    CHECK(st.state.t == doctest::Approx(0.02));
    CHECK_FALSE(st.terminal);
    CHECK(st.state.qd[0] > 0.0);

    // clipped torque is what gets charged
    CHECK(step_env(s, {1.0, 0.0}, cfg).reward == doctest::Approx(-std::hypot(0.05, 0.12) - 16.0 * 0.0025));
    CHECK_THROWS_AS(step_env(s, {NAN, 0.0}, cfg), std::invalid_argument);

    ManipulatorState last = s;
    last.t = 0.02 * 49;
    CHECK(step_env(last, {0.0, 0.0}, cfg).terminal);
}

TEST_CASE("idle arm succeeds exactly when the target spawns near the fingertip") {
    const auto cfg = quick_env();
    const ZeroPolicy zero;
    for (std::uint64_t n = 0; n < 2000; ++n) {
        Rng rng(stream_seed(11, n));
        const auto s = reset_episode(cfg, rng);
        const bool near = tip_distance(s, cfg.arm) < 0.04;
        const auto out = run_episode(zero, cfg, stream_seed(11, n));
        CHECK(out.success == near);
        CHECK(out.steps == (near ? 0 : 50));
    }
}

TEST_CASE("servo policy reaches nearly every target") {
    const auto cfg = quick_env();
    const ServoPolicy servo(cfg.arm);
    const auto report = evaluate_policy(servo, 1000, cfg, 42);
    CHECK(report.success_rate > 0.95);
    CHECK(report.aborted == 0);

    SUBCASE("longer hold window still succeeds, impossible window never does") {
        ReacherConfig held = cfg;
        held.criterion.window = 3;
        CHECK(evaluate_policy(servo, 200, held, 42).success_rate > 0.9);
        held.criterion.window = 51;
        CHECK(evaluate_policy(servo, 200, held, 42).successes == 0);
    }
}

TEST_CASE("evaluation is independent of the worker count") {
    const auto cfg = quick_env();
    const ServoPolicy servo(cfg.arm);
    setenv("CIRCUFLOW_THREADS", "1", 1);
    const auto one = evaluate_policy(servo, 300, cfg, 5);
    setenv("CIRCUFLOW_THREADS", "4", 1);
    const auto four = evaluate_policy(servo, 300, cfg, 5);
    unsetenv("CIRCUFLOW_THREADS");
    CHECK(one.successes == four.successes);
    CHECK(one.mean_final_distance == four.mean_final_distance);
    CHECK(one.mean_return == four.mean_return);
}

TEST_CASE("mlp policy") {
    const std::vector<int> layers{11, 16, 2};
    CHECK(MlpPolicy::param_count(layers) == 11 * 16 + 16 + 16 * 2 + 2);
    const auto a = MlpPolicy::random_init(layers, 0.05, 1, 3.0);
    const auto b = MlpPolicy::random_init(layers, 0.05, 1, 3.0);
    CHECK(a.params() == b.params());
    Observation obs{};
    for (std::size_t i = 0; i < obs.size(); ++i) obs[i] = 10.0 * std::sin(static_cast<double>(i));
    const Vec2 tau = a.act(obs);
    CHECK(std::abs(tau[0]) <= 0.05);
    CHECK(std::abs(tau[1]) <= 0.05);

    const auto back = MlpPolicy::from_json(a.to_json());
    CHECK(back.params() == a.params());
    CHECK(back.layers() == a.layers());
    CHECK(back.act(obs) == tau);

    CHECK_THROWS_AS(MlpPolicy::from_json("{"), LoadError);
    CHECK_THROWS_AS(MlpPolicy::from_json(R"({"format":"circuflow-policy","version":1,"layers":[11,2],)"
                                         R"("activation":"tanh","torque_limit":0.05,"params":[1,2]})"),
                    LoadError);
    CHECK_THROWS(MlpPolicy({11, 2}, 0.05, {1.0}));

    const auto path = std::filesystem::temp_directory_path() / "circuflow_policy_test.json";
    a.save(path.string());
    CHECK(make_policy(path.string(), ManipulatorParams{})->act(obs) == tau);
    std::filesystem::remove(path);
    CHECK(make_policy("zero", ManipulatorParams{})->name() == "zero");
    CHECK(make_policy("servo", ManipulatorParams{})->name() == "servo");
    CHECK_THROWS(make_policy("/nonexistent/policy.json", ManipulatorParams{}));
}

TEST_CASE("cross-entropy training is deterministic and never returns a worse policy") {
    TrainerConfig t;
    t.population = 12;
    t.elites = 3;
    t.generations = 4;
    t.episodes_per_candidate = 6;
    t.validation_episodes = 8;
    const auto r1 = train_cem(quick_env(), t, 3);
    const auto r2 = train_cem(quick_env(), t, 3);
    CHECK(r1.policy.params() == r2.policy.params());
    CHECK(r1.log.size() == 4);
    CHECK(r1.best_validation_return >= r1.initial_validation_return);
    if (!r1.improved()) CHECK(r1.policy.params() == r1.initial_policy.params());
    const auto csv = training_log_csv(r1.log);
    CHECK(csv.rfind("generation,", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);

    TrainerConfig bad = t;
    bad.elites = 20;
    CHECK_THROWS_AS(train_cem(quick_env(), bad, 3), std::invalid_argument);
}

TEST_CASE("picking success maps onto sorter parameters") {
    const auto c = success_to_sorter(0.9597, 0.05, 600.0, "plastic");
    CHECK(c.sorter.success_rate == 0.9597);
    CHECK(c.sorter.throughput == doctest::Approx(30.0 / 3600.0).epsilon(1e-15));
    CHECK(c.sorter.item_rate == 600.0);
    CHECK(c.sorter.item_mass == 0.05);
    CHECK(c.sorted_per_day == doctest::Approx(0.9597 * 720.0).epsilon(1e-12));
    CHECK(c.rejected_per_day == doctest::Approx(oracle::reject_mass(0.9597, 600.0, 0.05, 86400.0)).epsilon(1e-12));
    CHECK_THROWS_AS(success_to_sorter(1.1, 0.05, 600.0, "plastic"), std::invalid_argument);
    CHECK_THROWS_AS(success_to_sorter(0.5, 0.0, 600.0, "plastic"), std::invalid_argument);
    CHECK_THROWS_AS(success_to_sorter(0.5, 0.05, -1.0, "plastic"), std::invalid_argument);
    for (const auto& agent : kReferenceAgents) {
        CHECK(success_to_sorter(agent.success_rate, 0.05, 600.0, "plastic").sorter.success_rate == agent.success_rate);
    }
}

}  // TEST_SUITE

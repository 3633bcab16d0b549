#include <doctest.h>

#include <cmath>
#include <limits>

#include "circuflow/errors.hpp"
#include "circuflow/metrics.hpp"
#include "circuflow/simulator.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace circuflow;

namespace {

double store_of(const Network& net, const NetworkState& s, int k) {
    for (std::size_t c = 0; c < net.compartments.size(); ++c) {
        if (net.compartments[c].id.k == k) return s.store[c];
    }
    throw std::out_of_range("no compartment k=" + std::to_string(k));
}

double drain_error(double dt, Method method) {
    const Network net = fx::draining_transport(1.0, 1.0, dt, 1.0, method);
    const auto traj = simulate(net);
    return std::abs(store_of(net, traj.states.back(), 3) - oracle::lag_decay(1.0, 1.0, 1.0));
}

}  // namespace

TEST_SUITE("simulator") {

TEST_CASE("stock with net inflow of 1 kg/s holds 10 kg after 10 s") {
    const Network net = fx::fed_stock(2.0, 1.0, 0.1, 10.0);
    const auto traj = simulate(net);
    CHECK(traj.times.back() == 10.0);
    CHECK(std::abs(store_of(net, traj.states.back(), 2) - 10.0) <= 1e-12);
    CHECK(std::abs(store_of(net, traj.states.back(), 3) - 10.0) <= 1e-12);
}

TEST_CASE("transport drains like exp(-t/T)") {
    const Network net = fx::draining_transport(1.0, 1.0, 0.01, 1.0);
    const auto traj = simulate(net);
    CHECK(std::abs(store_of(net, traj.states.back(), 3) - std::exp(-1.0)) <= 1e-7);
    for (std::size_t i = 0; i < traj.times.size(); i += 10) {
        CHECK(std::abs(store_of(net, traj.states[i], 3) - oracle::lag_decay(1.0, 1.0, traj.times[i])) <= 1e-7);
    }
}

TEST_CASE("empty and idle networks do not move") {
    Network empty;
    empty.simulation = {0.5, 2.0, Method::Rk4};
    const auto e = simulate(empty);
    CHECK(e.times.size() == 5);
    for (const auto& s : e.states) CHECK(s.store.empty());

    Network idle = fx::closed_loop(0.1, 1.0);
    for (auto& c : idle.compartments) c.initial_mass.clear();
    const auto x0 = initial_state(idle);
    for (Method m : {Method::Rk4, Method::Euler}) {
        CHECK(step(idle, x0, 0.1, m).state == x0);
    }
    for (const auto& s : simulate(idle).states) CHECK(s == x0);
}

TEST_CASE("closed loop conserves mass over 1e5 steps") {
    const Network net = fx::closed_loop(0.001, 100.0);
    const auto traj = simulate(net);
    CHECK(traj.steps() == 100000);
    const auto report = check_conservation(traj);
    CHECK(report.passed);
    const double end = total_mass(net, traj.states.back()).at("water");
    CHECK(std::abs(end - 10.0) <= 1e-14 * 100000 * 10.0);
}

TEST_CASE("ledger identity holds with a source and a sink") {
    const Network net = fx::fed_stock(2.0, 1.0, 0.1, 10.0);
    const auto traj = simulate(net);
    CHECK(check_conservation(traj).passed);
    const auto& l = traj.ledger.back();
    CHECK(l.extracted[0] == doctest::Approx(20.0).epsilon(1e-13));
    CHECK(l.stored[0] + l.sunk[0] == doctest::Approx(l.extracted[0]).epsilon(1e-13));
}

TEST_CASE("bundled networks pass the conservation check") {
    for (const char* name : fx::kBundled) {
        CAPTURE(name);
        const auto traj = simulate(fx::load(name));
        const auto report = check_conservation(traj);
        CHECK(report.passed);
        CHECK(traj.min_store_before_clamp >= -1e-12);
        for (const auto& s : traj.states)
            for (double m : s.store) CHECK(m >= 0.0);
    }
}

TEST_CASE("landfill in the linear network fills strictly monotonically") {
    const Network net = fx::load("fig3b_synthetic_linear");
    const auto traj = simulate(net);
    for (std::size_t i = 1; i < traj.states.size(); ++i) {
        CAPTURE(i);
        CHECK(store_of(net, traj.states[i], 4) > store_of(net, traj.states[i - 1], 4));
    }
}

TEST_CASE("circular design extracts less than the linear one") {
    const auto lin = circularity(simulate(fx::load("fig3b_synthetic_linear")));
    const auto circ = circularity(simulate(fx::load("fig3c_synthetic_circular")));
    CHECK(circ.cumulative_extraction < lin.cumulative_extraction);
    CHECK(circ.cumulative_unsustainable < lin.cumulative_unsustainable);
}

TEST_CASE("a sorter that creates 1% extra mass is caught with its step index") {
    const Network net = fx::load("fig3c_synthetic_circular");
    SimConfig cfg = SimConfig::from(net);
    cfg.rate_hook = [](const Compartment& c, CompartmentRates& r) {
        if (c.kind() == Kind::Sorter)
            for (double& o : r.out) o *= 1.01;
    };
    const auto report = check_conservation(simulate(net, cfg));
    CHECK_FALSE(report.passed);
    REQUIRE(report.first_failure_step.has_value());
    CHECK(*report.first_failure_step >= 1);
    CHECK(report.failing_material == "plastic");

    // and the unmodified run passes
    CHECK(check_conservation(simulate(net)).passed);
}

TEST_CASE("non-finite rates raise NumericError") {
    const Network net = fx::closed_loop(0.1, 1.0);
    SimConfig cfg = SimConfig::from(net);
    cfg.rate_hook = [](const Compartment& c, CompartmentRates& r) {
        if (c.id.k == 3) r.out[0] = std::numeric_limits<double>::quiet_NaN();
    };
    CHECK_THROWS_AS(simulate(net, cfg), NumericError);

    Network tiny = fx::draining_transport(1.0, 1e-320, 1.0, 1.0);
    CHECK_THROWS_AS(simulate(tiny), NumericError);
}

TEST_CASE("invalid networks are rejected before simulation") {
    Network net = fx::closed_loop(0.1, 1.0);
    net.connections.pop_back();
    net.connections.push_back(fx::link("e3", 2, "out", 9, "in"));
    CHECK_THROWS_AS(Simulator{net}, ValidationError);
}

TEST_CASE("RK4 converges at fourth order, Euler at first") {
    const double rk_order = std::log2(drain_error(0.1, Method::Rk4) / drain_error(0.05, Method::Rk4));
    CHECK(rk_order >= 3.7);
    const double eu_order = std::log2(drain_error(0.01, Method::Euler) / drain_error(0.005, Method::Euler));
    CHECK(eu_order == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("final step lands on the horizon") {
    const auto traj = simulate(fx::draining_transport(1.0, 1.0, 0.3, 1.0));
    REQUIRE(traj.times.size() == 5);
    CHECK(traj.times[3] == doctest::Approx(0.9));
    CHECK(traj.times[4] == 1.0);
}

TEST_CASE("repeated runs are bit-identical") {
    const Network net = fx::load("fig3f_bio_repair");
    const auto a = simulate(net);
    const auto b = simulate(net);
    CHECK(a.states == b.states);
    CHECK(a.cumulative == b.cumulative);
}

TEST_CASE("source exhaustion is recorded once") {
    Network net = fx::fed_stock(2.0, 1.0, 0.1, 10.0);
    std::get<SourceParams>(net.compartments[0].params).reserve = 5.0;
    const auto traj = simulate(net);
    REQUIRE(traj.events.size() == 1);
    CHECK(traj.events[0].kind == "reserve_exhausted");
    CHECK(traj.events[0].time >= 2.5);
    CHECK(traj.events[0].time <= 5.0);
    CHECK(traj.ledger.back().extracted[0] == doctest::Approx(5.0).epsilon(1e-9));
    CHECK(check_conservation(traj).passed);
}

}  // TEST_SUITE

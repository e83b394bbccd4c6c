#include <doctest.h>

#include <cmath>
#include <random>

#include "support/states.hpp"
#include "twt/errors.hpp"
#include "twt/simkit.hpp"

using namespace twt;
using namespace twt::sim;
using doctest::Approx;

namespace {
Scenario base_scenario() {
    Scenario sc;
    sc.params = test::default_params();
    sc.x0 = operating_point(sc, 0.1);
    return sc;
}
}  // namespace

TEST_CASE("wind profiles") {
    const WindProfile c = WindProfile::constant(10.0, 0.2);
    for (double t : {0.0, 1.0, 5.0}) {
        const aero::WindSample s = c.sample(t);
        CHECK(s.speed == 10.0);
        CHECK(s.direction == 0.2);
        CHECK(s.speed_rate == 0.0);
        CHECK(s.direction_rate == 0.0);
    }

    const WindProfile st = WindProfile::step(10.0, 0.0, 3.0, 12.0, 0.15);
    CHECK(st.sample(2.999).speed == 10.0);
    CHECK(st.sample(3.0).speed == 12.0);
    CHECK(st.sample(3.0).direction == 0.15);

    const WindProfile r = WindProfile::ramp(10.0, 0.5, 0.0, 0.01);
    CHECK(r.sample(2.0).speed == Approx(11.0));
    CHECK(r.sample(2.0).speed_rate == 0.5);
    CHECK(r.sample(2.0).direction_rate == 0.01);

    // same seed, same sequence; different seed, different sequence
    const WindProfile t1 = WindProfile::turbulence(10.0, 0.0, 0.5, 8, 0.5, 6.0, 42);
    const WindProfile t2 = WindProfile::turbulence(10.0, 0.0, 0.5, 8, 0.5, 6.0, 42);
    const WindProfile t3 = WindProfile::turbulence(10.0, 0.0, 0.5, 8, 0.5, 6.0, 43);
    bool any_diff = false;
    for (int i = 0; i < 50; ++i) {
        const double t = 0.1 * i;
        CHECK(t1.sample(t).speed == t2.sample(t).speed);
        any_diff = any_diff || t1.sample(t).speed != t3.sample(t).speed;
    }
    CHECK(any_diff);

    // turbulence speed rate matches a finite difference of the speed
    const double h = 1e-6;
    for (double t : {0.3, 1.7, 4.4}) {
        const double fd = (t1.sample(t + h).speed - t1.sample(t - h).speed) / (2.0 * h);
        CHECK(t1.sample(t).speed_rate == Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("determinism: identical scenario, bit-identical series") {
    Scenario sc = base_scenario();
    sc.integrator.t_end = 0.2;
    const RunResult a = integrate(sc);
    const RunResult b = integrate(sc);
    REQUIRE(a.completed());
    REQUIRE(b.completed());
    REQUIRE(a.series.size() == b.series.size());
    for (std::size_t k = 0; k < a.series.size(); ++k) {
        const auto pa = a.series.state[k].pack(), pb = b.series.state[k].pack();
        for (std::size_t i = 0; i < pa.size(); ++i) CHECK(pa[i] == pb[i]);
        const auto ua = a.series.input[k].pack(), ub = b.series.input[k].pack();
        for (std::size_t i = 0; i < ua.size(); ++i) CHECK(ua[i] == ub[i]);
    }
}

TEST_CASE("RK4 order via step halving on a smooth scenario") {
    // Open-loop (controller off) healthy run: the vector field is smooth, so
    // the observed convergence order must sit near 4.
    Scenario sc = base_scenario();
    sc.law = ControlLaw::None;
    sc.integrator.t_end = 0.25;

    auto final_state = [&](double dt) {
        Scenario s = sc;
        s.integrator.dt = dt;
        const RunResult r = integrate(s);
        REQUIRE(r.completed());
        return r.series.state.back().pack();
    };
    const auto x1 = final_state(4e-4);
    const auto x2 = final_state(2e-4);
    const auto x3 = final_state(1e-4);
    const auto x4 = final_state(5e-5);

    auto err = [](const plant::PlantState::Packed& a, const plant::PlantState::Packed& b) {
        double acc = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) acc = std::max(acc, std::abs(a[i] - b[i]));
        return acc;
    };
    const double e1 = err(x1, x2), e2 = err(x2, x3), e3 = err(x3, x4);
    const double order12 = std::log2(e1 / e2);
    const double order23 = std::log2(e2 / e3);
    CHECK(order12 > 3.7);
    CHECK(order12 < 4.3);
    CHECK(order23 > 3.7);
    CHECK(order23 < 4.3);
}

TEST_CASE("euler integration converges at first order") {
    Scenario sc = base_scenario();
    sc.law = ControlLaw::None;
    sc.integrator.t_end = 0.1;
    sc.integrator.method = Method::Euler;
    auto final_state = [&](double dt) {
        Scenario s = sc;
        s.integrator.dt = dt;
        const RunResult r = integrate(s);
        REQUIRE(r.completed());
        return r.series.state.back().pack();
    };
    const auto x1 = final_state(4e-5);
    const auto x2 = final_state(2e-5);
    const auto x3 = final_state(1e-5);
    double e1 = 0.0, e2 = 0.0;
    for (std::size_t i = 0; i < x1.size(); ++i) {
        e1 = std::max(e1, std::abs(x1[i] - x2[i]));
        e2 = std::max(e2, std::abs(x2[i] - x3[i]));
    }
    const double order = std::log2(e1 / e2);
    CHECK(order > 0.7);
    CHECK(order < 1.3);
}

TEST_CASE("fault switches in at the first grid point past its onset") {
    Scenario sc = base_scenario();
    sc.fault.severity = 0.2;
    sc.fault.turbine = 1;
    sc.fault.onset_time = 0.05;
    sc.integrator.t_end = 0.1;
    const RunResult r = integrate(sc);
    REQUIRE(r.completed());

    const long k_on = std::lround(sc.fault.onset_time / sc.integrator.dt);
    const aero::WindSample w = sc.wind.sample(0.0);
    for (const long k : {k_on - 2, k_on - 1}) {
        const double t = r.series.t[static_cast<std::size_t>(k)];
        const auto& x = r.series.state[static_cast<std::size_t>(k)];
        const auto with_fault = plant::drift_field(x, t, sc.fault, w, sc.params);
        const auto healthy = plant::drift_field(x, t, machine::FaultSpec::healthy(), w, sc.params);
        for (int row = 0; row < 12; ++row)
            CHECK(with_fault[static_cast<std::size_t>(row)] ==
                  healthy[static_cast<std::size_t>(row)]);
    }
    {
        const double t = r.series.t[static_cast<std::size_t>(k_on)];
        const auto& x = r.series.state[static_cast<std::size_t>(k_on)];
        const auto with_fault = plant::drift_field(x, t, sc.fault, w, sc.params);
        const auto healthy = plant::drift_field(x, t, machine::FaultSpec::healthy(), w, sc.params);
        double diff = 0.0;
        for (int row = 4; row < 7; ++row)
            diff += std::abs(with_fault[static_cast<std::size_t>(row)] -
                             healthy[static_cast<std::size_t>(row)]);
        CHECK(diff > 1e-3);
    }

    // state continuity across the onset: the across-switch step moves the
    // state no more than ordinary neighboring steps do (no impulse)
    auto step_delta = [&](long k) {
        const auto a = r.series.state[static_cast<std::size_t>(k)].pack();
        const auto b = r.series.state[static_cast<std::size_t>(k + 1)].pack();
        double d = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(b[i] - a[i]));
        return d;
    };
    double neighborhood = 0.0;
    for (long k = k_on - 12; k < k_on - 1; ++k)
        neighborhood = std::max(neighborhood, step_delta(k));
    CHECK(step_delta(k_on - 1) < 3.0 * neighborhood);
    CHECK(step_delta(k_on) < 3.0 * neighborhood);
}

TEST_CASE("controller-off calm-wind run decays under friction") {
    // Calm wind, zero currents, rotors at rest: the yaw rate and the pitch
    // offsets are the only moving parts and they decay dissipatively.
    Scenario sc = base_scenario();
    sc.law = ControlLaw::None;
    sc.wind = WindProfile::constant(0.0, 0.0);
    sc.x0 = plant::PlantState{};
    sc.x0.beta1 = 0.25;
    sc.x0.beta2 = -0.05;
    sc.x0.psi = 0.4;
    sc.x0.psi_dot = 0.3;
    sc.integrator.t_end = 2.0;
    const RunResult r = integrate(sc);
    REQUIRE(r.completed());
    const auto& last = r.series.state.back();
    CHECK(std::abs(last.psi_dot) < 0.5 * std::abs(sc.x0.psi_dot));  // tau = dr/fr = 2 s
    CHECK(last.beta1 == Approx(sc.params.pitch_reference).epsilon(1e-6));
    CHECK(last.beta2 == Approx(sc.params.pitch_reference).epsilon(1e-6));
    for (double v : last.currents1) CHECK(v == 0.0);
    CHECK(last.omega1 == 0.0);
}

TEST_CASE("integrate rejects invalid configs and flags NaN states") {
    Scenario sc = base_scenario();
    sc.integrator.dt = -1.0;
    CHECK_THROWS_AS(integrate(sc), ConfigError);

    Scenario nan_sc = base_scenario();
    nan_sc.x0.currents1[0] = std::numeric_limits<double>::quiet_NaN();
    nan_sc.integrator.t_end = 0.01;
    const RunResult r = integrate(nan_sc);
    CHECK(r.status == RunStatus::Diverged);
    CHECK(r.fail_time == 0.0);
}

TEST_CASE("zero dynamics: the pitch sum follows its first-order reference law") {
    // Closed loop with the active law and a fault: beta1 + beta2 must still
    // obey the exact linear dynamics driven by beta_ref, because the
    // differential command cancels in the sum.
    Scenario sc = base_scenario();
    sc.fault.severity = 0.15;
    sc.fault.turbine = 1;
    sc.fault.onset_time = 1.0;
    sc.integrator.t_end = 3.0;
    sc.x0.beta1 = 0.05;  // start the sum off its equilibrium
    sc.x0.beta2 = 0.02;
    const RunResult r = integrate(sc);
    REQUIRE(r.completed());

    const double tb = sc.params.aero.pitch_time_constant;
    const double bref = sc.params.pitch_reference;
    const double z0 = sc.x0.beta1 + sc.x0.beta2;
    double worst = 0.0;
    for (std::size_t k = 0; k < r.series.size(); k += 100) {
        const double t = r.series.t[k];
        const double z = r.series.state[k].beta1 + r.series.state[k].beta2;
        const double analytic = 2.0 * bref + (z0 - 2.0 * bref) * std::exp(-t / tb);
        worst = std::max(worst, std::abs(z - analytic));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("metrics extraction") {
    // all-zero trajectory: no divergence, zero errors
    TimeSeries ts;
    control::References refs;
    for (int k = 0; k <= 100; ++k) {
        ts.t.push_back(0.01 * k);
        plant::PlantState x;
        x.omega1 = refs.omega_ref1;
        x.omega2 = refs.omega_ref2;
        ts.state.push_back(x);
        ts.input.push_back({});
        DerivedSample d;
        ts.derived.push_back(d);
    }
    RunMetrics m = extract_metrics(ts, refs, 0.0, 1.0);
    CHECK(m.psi_error_max == 0.0);
    CHECK(m.id_max[0] == 0.0);
    CHECK(m.phase_sum_max[0] == 0.0);
    CHECK(m.psi_settle_time == 0.0);

    // an injected sinusoid is picked up at its amplitude
    for (std::size_t k = 0; k < ts.size(); ++k) {
        ts.derived[k].dq1.d = 2.5 * std::sin(0.37 * static_cast<double>(k));
        ts.state[k].currents1 = {1.0, 1.0, 1.0};
    }
    m = extract_metrics(ts, refs, 0.0, 1.0);
    CHECK(m.id_max[0] == Approx(2.5).epsilon(0.01));
    CHECK(m.phase_sum_max[0] == Approx(3.0).epsilon(1e-12));
}

TEST_CASE("operating point balances the torques") {
    Scenario sc = base_scenario();
    const plant::PlantState x = operating_point(sc, 0.0);
    CHECK(x.omega1 == sc.refs.omega_ref1);
    const machine::DqCurrents dq = machine::dq_currents(x.currents1, x.theta_e1);
    CHECK(dq.d == Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(dq.h == Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(dq.q > 0.0);  // generator loaded against the wind torque
}

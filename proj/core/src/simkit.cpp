#include "twt/simkit.hpp"

#include <algorithm>
#include <cmath>

#include "twt/errors.hpp"

namespace twt::sim {

void IntegratorConfig::validate() const {
    if (!(dt > 0.0)) throw ConfigError("integrator.dt must be > 0");
    if (!(t_end > 0.0)) throw ConfigError("integrator.t_end must be > 0");
}

void Scenario::validate() const {
    params.validate();
    refs.validate();
    gains.validate();
    fault.validate();
    integrator.validate();
    if (!(divergence_current_factor > 1.0))
        throw ConfigError("sim.divergence_current_factor must be > 1");
}

const char* to_string(RunStatus status) {
    switch (status) {
        case RunStatus::Completed: return "completed";
        case RunStatus::Diverged: return "diverged";
        case RunStatus::SingularDecoupling: return "singular_decoupling";
        case RunStatus::ModelSingularity: return "model_singularity";
    }
    return "unknown";
}

plant::PlantState operating_point(const Scenario& scenario, double psi_offset) {
    const aero::WindSample wind = scenario.wind.sample(0.0);
    const plant::PlantParams& p = scenario.params;
    plant::PlantState x;
    x.beta1 = x.beta2 = scenario.refs.beta_ref;
    x.psi = wind.direction + psi_offset;
    x.psi_dot = 0.0;
    x.omega1 = scenario.refs.omega_ref1;
    x.omega2 = scenario.refs.omega_ref2;
    x.theta_e1 = x.theta_e2 = 0.0;

    const double w = wind.speed * std::cos(psi_offset);
    for (int m = 0; m < 2; ++m) {
        const double omega = (m == 0) ? x.omega1 : x.omega2;
        const double lambda = p.aero.blade_radius * omega / w;
        const double cp = aero::power_coefficient(lambda, scenario.refs.beta_ref);
        const double torque = 0.5 * 3.14159265358979323846 * p.aero.air_density /
                              std::max(lambda, aero::kTipSpeedFloor) * cp *
                              p.aero.blade_radius * p.aero.blade_radius * p.aero.blade_radius * w *
                              w;
        const double iq = (torque - p.machine.viscous_friction * omega) /
                          (p.machine.pole_pairs * p.machine.magnet_flux);
        const Vec3 dq{0.0, iq, 0.0};
        const Vec3 I = machine::park_transform(0.0).transposed() * dq;
        if (m == 0)
            x.currents1 = I;
        else
            x.currents2 = I;
    }
    return x;
}

namespace {

plant::PlantInput eval_control(const Scenario& sc, const plant::PlantState& x, double t,
                               const aero::WindSample& wind) {
    switch (sc.law) {
        case ControlLaw::Active:
            return control::active_control(x, t, sc.fault, wind, sc.refs, sc.gains, sc.params);
        case ControlLaw::Passive:
            return control::passive_control(x, t, wind, sc.refs, sc.gains, sc.params);
        case ControlLaw::None:
            return {};
    }
    return {};
}

DerivedSample derive(const Scenario& sc, const plant::PlantState& x, double t,
                     const aero::WindSample& wind) {
    DerivedSample d;
    d.dq1 = machine::dq_currents(x.currents1, x.theta_e1);
    d.dq2 = machine::dq_currents(x.currents2, x.theta_e2);
    d.torque_em1 = machine::electromagnetic_torque(d.dq1.d, d.dq1.q, sc.params.machine);
    d.torque_em2 = machine::electromagnetic_torque(d.dq2.d, d.dq2.q, sc.params.machine);
    d.wind_speed = wind.speed;
    d.wind_direction = wind.direction;
    d.fault_severity = sc.fault.severity_for(sc.fault.turbine, t);
    const plant::PlantEval e = plant::evaluate(x, t, sc.fault, wind, sc.params);
    d.torque_aero1 = e.turbine[0].torque_aero;
    d.torque_aero2 = e.turbine[1].torque_aero;
    d.drag1 = e.turbine[0].drag;
    d.drag2 = e.turbine[1].drag;
    return d;
}

double max_abs_current(const plant::PlantState& x) {
    double m = 0.0;
    for (double v : x.currents1) m = std::max(m, std::abs(v));
    for (double v : x.currents2) m = std::max(m, std::abs(v));
    return m;
}

bool state_finite(const plant::PlantState::Packed& v, double cap) {
    for (double x : v)
        if (!std::isfinite(x) || std::abs(x) > cap) return false;
    return true;
}

}  // namespace

RunResult integrate(const Scenario& scenario) {
    scenario.validate();
    const double dt = scenario.integrator.dt;
    const long n_steps = std::lround(scenario.integrator.t_end / dt);

    RunResult result;
    TimeSeries& ts = result.series;
    ts.t.reserve(static_cast<std::size_t>(n_steps) + 1);
    ts.state.reserve(static_cast<std::size_t>(n_steps) + 1);
    ts.input.reserve(static_cast<std::size_t>(n_steps) + 1);
    ts.derived.reserve(static_cast<std::size_t>(n_steps) + 1);

    // The closed-loop vector field; the law is re-evaluated at every stage.
    auto rhs = [&](double t, const plant::PlantState::Packed& packed) {
        const plant::PlantState x = plant::PlantState::unpack(packed);
        const aero::WindSample wind = scenario.wind.sample(t);
        const plant::PlantInput u = eval_control(scenario, x, t, wind);
        return plant::full_derivative(x, u, t, scenario.fault, wind, scenario.params);
    };

    plant::PlantState::Packed y = scenario.x0.pack();
    const bool fault_scheduled = scenario.fault.severity > 0.0;
    // The healthy reference peak starts from the initial state so scenarios
    // whose fault is active from t = 0 still get a meaningful bound.
    double healthy_peak = max_abs_current(scenario.x0);

    const auto diverged = [&](const plant::PlantState& x, double t) -> bool {
        if (!fault_scheduled) return false;
        if (t < scenario.fault.onset_time) {
            healthy_peak = std::max(healthy_peak, max_abs_current(x));
            return false;
        }
        const double limit =
            std::max(scenario.divergence_current_factor * healthy_peak, 1e-3);
        return max_abs_current(x) > limit;
    };

    try {
        for (long k = 0; k <= n_steps; ++k) {
            const double t = static_cast<double>(k) * dt;
            const plant::PlantState x = plant::PlantState::unpack(y);
            const aero::WindSample wind = scenario.wind.sample(t);

            if (!state_finite(y, scenario.divergence_state_cap)) {
                result.status = RunStatus::Diverged;
                result.fail_time = t;
                result.message = "non-finite or unbounded state";
                return result;
            }
            if (diverged(x, t)) {
                result.status = RunStatus::Diverged;
                result.fail_time = t;
                result.message = "phase current exceeded divergence bound";
                return result;
            }

            // evaluate before recording so a throwing law cannot leave the
            // series columns with inconsistent lengths
            const plant::PlantInput u = eval_control(scenario, x, t, wind);
            const DerivedSample d = derive(scenario, x, t, wind);
            ts.t.push_back(t);
            ts.state.push_back(x);
            ts.input.push_back(u);
            ts.derived.push_back(d);

            if (k == n_steps) break;

            if (scenario.integrator.method == Method::Euler) {
                const auto k1 = rhs(t, y);
                for (int i = 0; i < plant::PlantState::kSize; ++i)
                    y[static_cast<std::size_t>(i)] += dt * k1[static_cast<std::size_t>(i)];
            } else {
                const auto k1 = rhs(t, y);
                plant::PlantState::Packed w2 = y;
                for (int i = 0; i < plant::PlantState::kSize; ++i)
                    w2[static_cast<std::size_t>(i)] += 0.5 * dt * k1[static_cast<std::size_t>(i)];
                const auto k2 = rhs(t + 0.5 * dt, w2);
                plant::PlantState::Packed w3 = y;
                for (int i = 0; i < plant::PlantState::kSize; ++i)
                    w3[static_cast<std::size_t>(i)] += 0.5 * dt * k2[static_cast<std::size_t>(i)];
                const auto k3 = rhs(t + 0.5 * dt, w3);
                plant::PlantState::Packed w4 = y;
                for (int i = 0; i < plant::PlantState::kSize; ++i)
                    w4[static_cast<std::size_t>(i)] += dt * k3[static_cast<std::size_t>(i)];
                const auto k4 = rhs(t + dt, w4);
                for (int i = 0; i < plant::PlantState::kSize; ++i)
                    y[static_cast<std::size_t>(i)] +=
                        dt / 6.0 *
                        (k1[static_cast<std::size_t>(i)] + 2.0 * k2[static_cast<std::size_t>(i)] +
                         2.0 * k3[static_cast<std::size_t>(i)] + k4[static_cast<std::size_t>(i)]);
            }
        }
    } catch (const SingularDecoupling& e) {
        result.status = RunStatus::SingularDecoupling;
        result.fail_time = ts.t.empty() ? 0.0 : ts.t.back();
        result.message = e.what();
        return result;
    } catch (const Error& e) {
        result.status = RunStatus::ModelSingularity;
        result.fail_time = ts.t.empty() ? 0.0 : ts.t.back();
        result.message = e.what();
        return result;
    }
    return result;
}

RunMetrics extract_metrics(const TimeSeries& ts, const control::References& refs, double t0,
                           double t1, const SettleBands& bands) {
    RunMetrics m;
    m.window_t0 = t0;
    m.window_t1 = t1;
    if (ts.size() == 0) return m;

    auto omega_err_rel = [&](const plant::PlantState& x, int mach) {
        const double ref = (mach == 0) ? refs.omega_ref1 : refs.omega_ref2;
        return std::abs(((mach == 0) ? x.omega1 : x.omega2) - ref) / std::abs(ref);
    };

    double last_psi_violation = -1.0;
    double last_omega_violation[2] = {-1.0, -1.0};

    for (std::size_t k = 0; k < ts.size(); ++k) {
        const double t = ts.t[k];
        const plant::PlantState& x = ts.state[k];
        const DerivedSample& d = ts.derived[k];
        const double alpha =
            refs.fixed_yaw_target ? *refs.fixed_yaw_target : d.wind_direction;
        const double psi_err = std::abs(x.psi - alpha);

        if (psi_err >= bands.psi) last_psi_violation = t;
        for (int mach = 0; mach < 2; ++mach)
            if (omega_err_rel(x, mach) >= bands.omega_rel) last_omega_violation[mach] = t;

        if (t < t0 || t > t1) continue;
        m.psi_error_max = std::max(m.psi_error_max, psi_err);
        for (int mach = 0; mach < 2; ++mach) {
            m.omega_error_rel_max[mach] =
                std::max(m.omega_error_rel_max[mach], omega_err_rel(x, mach));
            const machine::DqCurrents& dq = (mach == 0) ? d.dq1 : d.dq2;
            m.id_max[mach] = std::max(m.id_max[mach], std::abs(dq.d));
            m.ih_max[mach] = std::max(m.ih_max[mach], std::abs(dq.h));
            const Vec3& I = x.currents(mach);
            m.phase_sum_max[mach] = std::max(m.phase_sum_max[mach], std::abs(sum(I)));
            for (double v : I) m.phase_current_peak[mach] = std::max(m.phase_current_peak[mach], std::abs(v));
        }
    }

    const double t_last = ts.t.back();
    auto settle = [&](double last_violation) -> double {
        if (last_violation < 0.0) return ts.t.front();
        if (last_violation >= t_last) return -1.0;
        return last_violation;  // error stays inside the band from here on
    };
    m.psi_settle_time = settle(last_psi_violation);
    m.omega_settle_time[0] = settle(last_omega_violation[0]);
    m.omega_settle_time[1] = settle(last_omega_violation[1]);
    return m;
}

RunMetrics extract_metrics(const RunResult& result, const Scenario& scenario) {
    double t0 = scenario.metrics_t0;
    double t1 = scenario.metrics_t1;
    const double t_end = scenario.integrator.t_end;
    if (t0 < 0.0 || t1 < 0.0 || t1 <= t0) {
        t0 = 0.8 * t_end;
        t1 = t_end;
    }
    RunMetrics m = extract_metrics(result.series, scenario.refs, t0, t1);
    m.status = result.status;
    m.diverged = !result.completed();
    m.fail_time = result.fail_time;

    // Pre-fault steady-state peak phase current, for the divergence bound.
    if (scenario.fault.severity > 0.0) {
        const double w0 = std::max(0.0, scenario.fault.onset_time - 2.0);
        for (std::size_t k = 0; k < result.series.size(); ++k) {
            const double t = result.series.t[k];
            if (t < w0 || t >= scenario.fault.onset_time) continue;
            const plant::PlantState& x = result.series.state[k];
            for (int mach = 0; mach < 2; ++mach)
                for (double v : x.currents(mach))
                    m.healthy_phase_peak = std::max(m.healthy_phase_peak, std::abs(v));
        }
    }
    return m;
}

}  // namespace twt::sim

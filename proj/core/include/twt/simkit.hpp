#pragma once

#include <string>
#include <vector>

#include "twt/control.hpp"
#include "twt/plant.hpp"
#include "twt/wind.hpp"

namespace twt::sim {

enum class Method { Rk4, Euler };

struct IntegratorConfig {
    double dt = 1e-4;    ///< step (s); > 1e-3 is allowed but warned against
    double t_end = 10.0; ///< horizon (s)
    Method method = Method::Rk4;

    void validate() const;
};

enum class ControlLaw { Active, Passive, None };

/// Everything one deterministic run needs.
struct Scenario {
    std::string name = "scenario";
    plant::PlantParams params;
    WindProfile wind = WindProfile::constant(10.0, 0.0);
    control::References refs;
    control::ControllerGains gains;
    machine::FaultSpec fault;
    ControlLaw law = ControlLaw::Active;
    IntegratorConfig integrator;
    plant::PlantState x0;
    /// Post-fault window over which metrics are computed; when unset it
    /// defaults to the last fifth of the horizon.
    double metrics_t0 = -1.0;
    double metrics_t1 = -1.0;
    /// Divergence: any phase current beyond this multiple of its pre-fault
    /// steady-state peak fails the run.
    double divergence_current_factor = 10.0;
    /// Absolute backstop on any state magnitude.
    double divergence_state_cap = 1e6;

    void validate() const;
};

/// Balanced operating point: rotors at their speed references with the
/// torque-balancing quadrature current, pitch at the reference, yaw offset
/// from the wind direction by psi_offset.
plant::PlantState operating_point(const Scenario& scenario, double psi_offset);

/// Per-step derived quantities recorded alongside the state.
struct DerivedSample {
    machine::DqCurrents dq1, dq2;
    double torque_em1 = 0.0, torque_em2 = 0.0;
    double torque_aero1 = 0.0, torque_aero2 = 0.0;
    double drag1 = 0.0, drag2 = 0.0;
    double wind_speed = 0.0, wind_direction = 0.0;
    double fault_severity = 0.0;
};

struct TimeSeries {
    std::vector<double> t;
    std::vector<plant::PlantState> state;
    std::vector<plant::PlantInput> input;
    std::vector<DerivedSample> derived;

    std::size_t size() const { return t.size(); }
};

enum class RunStatus {
    Completed,
    Diverged,            ///< current bound or non-finite state
    SingularDecoupling,
    ModelSingularity,    ///< singular inductance / degenerate aero state
};

const char* to_string(RunStatus status);

struct RunResult {
    TimeSeries series;
    RunStatus status = RunStatus::Completed;
    double fail_time = -1.0;  ///< time of the failure, when status != Completed
    std::string message;

    bool completed() const { return status == RunStatus::Completed; }
};

/// Fixed-step deterministic integration of the closed loop. The control law
/// is evaluated at every integrator stage (continuous law); the fault
/// switches in at the first grid point at or past its onset. Divergence
/// terminates the run gracefully with the partial series.
RunResult integrate(const Scenario& scenario);

struct RunMetrics {
    bool diverged = false;
    RunStatus status = RunStatus::Completed;
    double fail_time = -1.0;
    double psi_error_max = 0.0;          ///< max |psi - alpha| over the window
    double omega_error_rel_max[2] = {0.0, 0.0};
    double id_max[2] = {0.0, 0.0};
    double ih_max[2] = {0.0, 0.0};
    double phase_sum_max[2] = {0.0, 0.0};     ///< max |ia+ib+ic|
    double phase_current_peak[2] = {0.0, 0.0};
    double healthy_phase_peak = 0.0;     ///< pre-fault steady-state peak
    double psi_settle_time = -1.0;       ///< first time |psi-alpha| stays < band
    double omega_settle_time[2] = {-1.0, -1.0};
    double window_t0 = 0.0, window_t1 = 0.0;
};

struct SettleBands {
    double psi = 0.01;        ///< rad
    double omega_rel = 0.01;  ///< fraction of the reference
};

/// Metrics over [t0, t1]; settle times are measured over the whole series.
RunMetrics extract_metrics(const TimeSeries& ts, const control::References& refs, double t0,
                           double t1, const SettleBands& bands = {});
RunMetrics extract_metrics(const RunResult& result, const Scenario& scenario);

}  // namespace twt::sim

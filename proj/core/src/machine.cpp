#include "twt/machine.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "twt/errors.hpp"

namespace twt::machine {

namespace {
constexpr double kTwoThirdsPi = 2.0 * std::numbers::pi / 3.0;
const double kSqrt23 = std::sqrt(2.0 / 3.0);
const double kSqrt12 = std::sqrt(0.5);

void check_severity(double severity) {
    if (!(severity >= 0.0 && severity < 1.0))
        throw InvalidSeverity("fault severity must lie in [0, 1), got " +
                              std::to_string(severity));
}
}  // namespace

MachineParams MachineParams::from_dq(double rs, double phi_f, int pole_pairs, double Ld, double Lq,
                                     double Lh, double inertia, double viscous_friction) {
    MachineParams p;
    p.stator_resistance = rs;
    p.magnet_flux = phi_f;
    p.pole_pairs = pole_pairs;
    p.Ld = Ld;
    p.Lq = Lq;
    p.inertia = inertia;
    p.viscous_friction = viscous_friction;
    p.Ls2 = (Ld - Lq) / 3.0;
    p.Ls0 = (Ld + Lq + Lh) / 3.0;
    p.Ms0 = 0.5 * (Ld + Lq) - p.Ls0;
    return p;
}

void MachineParams::validate() const {
    auto fail = [](const std::string& msg) { throw ConfigError("machine." + msg); };
    if (!(stator_resistance > 0.0)) fail("rs must be > 0");
    if (!(magnet_flux > 0.0)) fail("phi_f must be > 0");
    if (pole_pairs < 1) fail("p must be >= 1");
    if (!(Ld > 0.0) || !(Lq > 0.0)) fail("Ld and Lq must be > 0");
    if (!(inertia > 0.0)) fail("J must be > 0");
    if (viscous_friction < 0.0) fail("fv must be >= 0");
    if (!(Ls0 > std::abs(Ms0)) || !(std::abs(Ms0) > 0.0)) fail("profile needs Ls0 > |Ms0| > 0");
    if (!(homopolar_inductance() > 0.0)) fail("homopolar inductance must be > 0");
    // The abc profile must reproduce the configured dq inductances.
    const double ld = Ls0 + Ms0 + 1.5 * Ls2;
    const double lq = Ls0 + Ms0 - 1.5 * Ls2;
    if (std::abs(ld - Ld) > 1e-9 * Ld || std::abs(lq - Lq) > 1e-9 * Lq)
        fail("abc profile (Ls0, Ls2, Ms0) inconsistent with Ld/Lq");
}

void FaultSpec::validate() const {
    check_severity(severity);
    if (turbine != 1 && turbine != 2)
        throw ConfigError("fault.turbine must be 1 or 2");
}

Mat3 inductance_matrix(double theta_e, const MachineParams& params) {
    const double t = 2.0 * theta_e;
    const double ca = std::cos(t);
    const double cb = std::cos(t - kTwoThirdsPi);
    const double cc = std::cos(t + kTwoThirdsPi);
    Mat3 m;
    m(0, 0) = params.Ls0 + params.Ls2 * ca;
    m(1, 1) = params.Ls0 + params.Ls2 * cc;
    m(2, 2) = params.Ls0 + params.Ls2 * cb;
    m(0, 1) = m(1, 0) = -params.Ms0 + params.Ls2 * cb;
    m(1, 2) = m(2, 1) = -params.Ms0 + params.Ls2 * ca;
    m(0, 2) = m(2, 0) = -params.Ms0 + params.Ls2 * cc;
    return m;
}

Mat3 inductance_matrix_dtheta(double theta_e, const MachineParams& params) {
    const double t = 2.0 * theta_e;
    const double sa = -2.0 * params.Ls2 * std::sin(t);
    const double sb = -2.0 * params.Ls2 * std::sin(t - kTwoThirdsPi);
    const double sc = -2.0 * params.Ls2 * std::sin(t + kTwoThirdsPi);
    Mat3 m;
    m(0, 0) = sa;
    m(1, 1) = sc;
    m(2, 2) = sb;
    m(0, 1) = m(1, 0) = sb;
    m(1, 2) = m(2, 1) = sa;
    m(0, 2) = m(2, 0) = sc;
    return m;
}

Mat3 fault_scale(const Mat3& healthy, double severity, Phase phase) {
    const int k = static_cast<int>(phase);
    const double f = 1.0 - severity;
    Mat3 m = healthy;
    for (int j = 0; j < 3; ++j) {
        m(k, j) *= f;
        if (j != k) m(j, k) *= f;
    }
    return m;
}

Mat3 fault_inductance_matrix(double theta_e, double severity, Phase phase,
                             const MachineParams& params) {
    check_severity(severity);
    return fault_scale(inductance_matrix(theta_e, params), severity, phase);
}

Vec3 emf_vector(double theta_e, const MachineParams& params) {
    return {params.magnet_flux * std::cos(theta_e),
            params.magnet_flux * std::cos(theta_e - kTwoThirdsPi),
            params.magnet_flux * std::cos(theta_e + kTwoThirdsPi)};
}

Vec3 emf_rate(double theta_e, double omega, const MachineParams& params) {
    const double s = -params.pole_pairs * omega * params.magnet_flux;
    return {s * std::sin(theta_e), s * std::sin(theta_e - kTwoThirdsPi),
            s * std::sin(theta_e + kTwoThirdsPi)};
}

Mat3 park_transform(double theta_e) {
    Mat3 p;
    p(0, 0) = kSqrt23 * std::cos(theta_e);
    p(0, 1) = kSqrt23 * std::cos(theta_e - kTwoThirdsPi);
    p(0, 2) = kSqrt23 * std::cos(theta_e + kTwoThirdsPi);
    p(1, 0) = -kSqrt23 * std::sin(theta_e);
    p(1, 1) = -kSqrt23 * std::sin(theta_e - kTwoThirdsPi);
    p(1, 2) = -kSqrt23 * std::sin(theta_e + kTwoThirdsPi);
    p(2, 0) = p(2, 1) = p(2, 2) = kSqrt23 * kSqrt12;
    return p;
}

DqCurrents dq_currents(const Vec3& currents, double theta_e) {
    const Vec3 dqh = park_transform(theta_e) * currents;
    return {dqh[0], dqh[1], dqh[2]};
}

double electromagnetic_torque(double id, double iq, const MachineParams& params) {
    return params.pole_pairs * ((params.Ld - params.Lq) * id * iq + params.magnet_flux * iq);
}

double rotor_acceleration(double torque_aero, double torque_em, double omega,
                          const MachineParams& params) {
    return (torque_aero - torque_em - params.viscous_friction * omega) / params.inertia;
}

Vec3 electrical_derivative(const ElectricalState& state, const Vec3& voltages, double severity,
                           Phase phase, const MachineParams& params) {
    check_severity(severity);
    const int k = static_cast<int>(phase);
    const double f = 1.0 - severity;

    const Mat3 L = fault_inductance_matrix(state.theta_e, severity, phase, params);
    if (cond1(L) > kInductanceCondLimit)
        throw SingularInductance("effective inductance condition number exceeds guard");
    const Mat3 Linv = inverse(L);
    const Mat3 dL = fault_scale(inductance_matrix_dtheta(state.theta_e, params), severity, phase);

    Vec3 resistive = state.currents;
    for (int j = 0; j < 3; ++j) resistive[static_cast<std::size_t>(j)] *= params.stator_resistance;
    resistive[static_cast<std::size_t>(k)] *= f;

    Vec3 emf = emf_rate(state.theta_e, state.omega, params);
    emf[static_cast<std::size_t>(k)] *= f;

    const double omega_e = params.pole_pairs * state.omega;
    const Vec3 rhs = voltages - resistive - omega_e * (dL * state.currents) - emf;
    return Linv * rhs;
}

}  // namespace twt::machine

#include "twt/plant.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "twt/errors.hpp"

namespace twt::plant {

namespace {
constexpr double kPi = std::numbers::pi;
}

PlantState::Packed PlantState::pack() const {
    return {beta1,        beta2,        psi,          psi_dot,     currents1[0], currents1[1],
            currents1[2], omega1,       currents2[0], currents2[1], currents2[2], omega2,
            theta_e1,     theta_e2};
}

PlantState PlantState::unpack(const Packed& v) {
    PlantState x;
    x.beta1 = v[0];
    x.beta2 = v[1];
    x.psi = v[2];
    x.psi_dot = v[3];
    x.currents1 = {v[4], v[5], v[6]};
    x.omega1 = v[7];
    x.currents2 = {v[8], v[9], v[10]};
    x.omega2 = v[11];
    x.theta_e1 = v[12];
    x.theta_e2 = v[13];
    return x;
}

PlantInput::Packed PlantInput::pack() const {
    return {delta_beta, voltages1[0], voltages1[1], voltages1[2],
            voltages2[0], voltages2[1], voltages2[2]};
}

PlantInput PlantInput::unpack(const Packed& v) {
    PlantInput u;
    u.delta_beta = v[0];
    u.voltages1 = {v[1], v[2], v[3]};
    u.voltages2 = {v[4], v[5], v[6]};
    return u;
}

void PlantParams::validate() const {
    aero.validate();
    machine.validate();
}

namespace {

MachineEval evaluate_machine(const PlantState& x, int m, double severity, machine::Phase phase,
                             const machine::MachineParams& mp) {
    MachineEval e;
    e.severity = severity;
    e.phase = phase;
    const double theta = x.theta_e(m);
    const double omega = x.omega(m);
    const Vec3& I = x.currents(m);

    e.inductance = machine::fault_inductance_matrix(theta, severity, phase, mp);
    if (cond1(e.inductance) > machine::kInductanceCondLimit)
        throw SingularInductance("machine inductance condition number exceeds guard");
    e.inductance_inv = inverse(e.inductance);
    e.inductance_dtheta =
        machine::fault_scale(machine::inductance_matrix_dtheta(theta, mp), severity, phase);
    e.park = machine::park_transform(theta);

    const int k = static_cast<int>(phase);
    const double f = 1.0 - severity;
    Vec3 resistive = I;
    for (auto& v : resistive) v *= mp.stator_resistance;
    resistive[static_cast<std::size_t>(k)] *= f;
    Vec3 emf = machine::emf_rate(theta, omega, mp);
    emf[static_cast<std::size_t>(k)] *= f;

    const double omega_e = mp.pole_pairs * omega;
    const Vec3 rhs = resistive + omega_e * (e.inductance_dtheta * I) + emf;
    e.current_drift = -1.0 * (e.inductance_inv * rhs);

    const Vec3 dqh = e.park * I;
    e.id = dqh[0];
    e.iq = dqh[1];
    e.ih = dqh[2];
    e.torque_em = machine::electromagnetic_torque(e.id, e.iq, mp);
    e.dtorque_did = mp.pole_pairs * (mp.Ld - mp.Lq) * e.iq;
    e.dtorque_diq = mp.pole_pairs * ((mp.Ld - mp.Lq) * e.id + mp.magnet_flux);

    // d/dt of the Park rows contributes p*Omega*(iq, -id, 0).
    const Vec3 pf = e.park * e.current_drift;
    e.id_rate_drift = omega_e * e.iq + pf[0];
    e.iq_rate_drift = -omega_e * e.id + pf[1];
    e.ih_rate_drift = pf[2];
    return e;
}

}  // namespace

PlantEval evaluate(const PlantState& x, double t, const machine::FaultSpec& fault,
                   const aero::WindSample& wind, const PlantParams& params) {
    PlantEval e;
    e.wind = wind;

    // Calm wind kills every aerodynamic term (they all carry w^2 factors);
    // SingularOrientation is reserved for a crosswind orientation, where the
    // tip speed ratio is genuinely undefined.
    const bool calm = wind.speed < aero::kEffectiveWindFloor;
    e.w = calm ? 0.0 : aero::effective_wind(wind.speed, x.psi, wind.direction);

    const double rel = x.psi - wind.direction;
    e.w_rate = calm ? 0.0
                    : wind.speed_rate * std::cos(rel) -
                          wind.speed * std::sin(rel) * (x.psi_dot - wind.direction_rate);

    const double rp = params.aero.blade_radius;
    e.C = 0.5 * kPi * params.aero.air_density * rp * rp * e.w * e.w;
    e.C_rate = kPi * params.aero.air_density * rp * rp * e.w * e.w_rate;

    for (int m = 0; m < 2; ++m) {
        const double severity = fault.severity_for(m + 1, t);
        e.mach[m] = evaluate_machine(x, m, severity, fault.phase, params.machine);
    }

    // The drag polynomials are fits over moderate tip speed ratios; past
    // kLambdaPolyMax they are extrapolated flat.
    constexpr double kLambdaPolyMax = 20.0;

    for (int m = 0; m < 2; ++m) {
        TurbineEval& tb = e.turbine[m];
        const double omega = x.omega(m);
        const double beta = x.beta(m);
        tb.beta_dot_drift = (params.pitch_reference - beta) / params.aero.pitch_time_constant;
        tb.omega_dot =
            machine::rotor_acceleration(0.0, e.mach[m].torque_em, omega, params.machine);
        if (calm) continue;

        tb.lambda = rp * omega / e.w;
        if (tb.lambda <= 0.0) throw DegenerateTipSpeed("tip speed ratio must be positive");
        const double lam_eff = std::max(tb.lambda, aero::kTipSpeedFloor);
        const bool poly_clamped = tb.lambda > kLambdaPolyMax;
        const double lam_poly = poly_clamped ? kLambdaPolyMax : tb.lambda;

        const aero::CpEval cp = aero::power_coefficient_eval(tb.lambda, beta);
        tb.cp = cp.value;
        tb.dcp_dlambda = cp.dlambda;
        tb.dcp_dbeta = cp.dbeta;

        tb.B = params.cd.B(lam_poly);
        tb.cd = params.cd.A(lam_poly) + tb.B * beta;
        tb.dcd_dlambda =
            poly_clamped ? 0.0 : params.cd.dA(lam_poly) + params.cd.dB(lam_poly) * beta;
        tb.drag = e.C * tb.cd;

        // Gamma_a = C * Rp * Cp / lambda, with the lambda floor of the torque law.
        tb.torque_aero = e.C * rp * tb.cp / lam_eff;
        if (tb.lambda >= aero::kTipSpeedFloor) {
            tb.dtorque_dlambda =
                e.C * rp * (tb.dcp_dlambda * lam_eff - tb.cp) / (lam_eff * lam_eff);
        } else {
            tb.dtorque_dlambda = 0.0;  // inside the floor the torque is flat in lambda
        }
        tb.dtorque_dbeta = e.C * rp * tb.dcp_dbeta / lam_eff;
        tb.dtorque_dw = 2.0 * tb.torque_aero / e.w;

        tb.omega_dot =
            machine::rotor_acceleration(tb.torque_aero, e.mach[m].torque_em, omega, params.machine);
    }

    e.psi_ddot = aero::yaw_acceleration(x.psi_dot, e.turbine[0].drag, e.turbine[1].drag,
                                        params.aero);

    if (!calm) {
        for (int m = 0; m < 2; ++m) {
            TurbineEval& tb = e.turbine[m];
            tb.lambda_dot_drift = rp * tb.omega_dot / e.w - tb.lambda * e.w_rate / e.w;
            tb.drag_rate_drift =
                e.C_rate * tb.cd +
                e.C * (tb.dcd_dlambda * tb.lambda_dot_drift + tb.B * tb.beta_dot_drift);
        }
    }
    return e;
}

DriftVector drift_field(const PlantEval& e, const PlantState& x) {
    DriftVector f{};
    f[0] = e.turbine[0].beta_dot_drift;
    f[1] = e.turbine[1].beta_dot_drift;
    f[2] = x.psi_dot;
    f[3] = e.psi_ddot;
    for (int j = 0; j < 3; ++j) {
        f[static_cast<std::size_t>(4 + j)] = e.mach[0].current_drift[static_cast<std::size_t>(j)];
        f[static_cast<std::size_t>(8 + j)] = e.mach[1].current_drift[static_cast<std::size_t>(j)];
    }
    f[7] = e.turbine[0].omega_dot;
    f[11] = e.turbine[1].omega_dot;
    return f;
}

DriftVector drift_field(const PlantState& x, double t, const machine::FaultSpec& fault,
                        const aero::WindSample& wind, const PlantParams& params) {
    return drift_field(evaluate(x, t, fault, wind, params), x);
}

InputMatrix input_matrix(const PlantEval& e, const PlantParams& params) {
    InputMatrix g{};
    const double inv_tb = 1.0 / params.aero.pitch_time_constant;
    g[0][0] = inv_tb;
    g[1][0] = -inv_tb;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            g[static_cast<std::size_t>(4 + i)][static_cast<std::size_t>(1 + j)] =
                e.mach[0].inductance_inv(i, j);
            g[static_cast<std::size_t>(8 + i)][static_cast<std::size_t>(4 + j)] =
                e.mach[1].inductance_inv(i, j);
        }
    return g;
}

InputMatrix input_matrix(const PlantState& x, double t, const machine::FaultSpec& fault,
                         const PlantParams& params) {
    // The input matrix does not touch the aerodynamic channel, so any valid
    // wind sample works; use a unit wind along the structure orientation.
    aero::WindSample wind;
    wind.speed = 1.0;
    wind.direction = x.psi;
    InputMatrix g{};
    const double inv_tb = 1.0 / params.aero.pitch_time_constant;
    g[0][0] = inv_tb;
    g[1][0] = -inv_tb;
    for (int m = 0; m < 2; ++m) {
        const double severity = fault.severity_for(m + 1, t);
        const Mat3 L =
            machine::fault_inductance_matrix(x.theta_e(m), severity, fault.phase, params.machine);
        if (cond1(L) > machine::kInductanceCondLimit)
            throw SingularInductance("machine inductance condition number exceeds guard");
        const Mat3 Linv = inverse(L);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                g[static_cast<std::size_t>(4 + 4 * m + i)][static_cast<std::size_t>(1 + 3 * m + j)] =
                    Linv(i, j);
    }
    return g;
}

PlantState::Packed full_derivative(const PlantEval& e, const PlantState& x, const PlantInput& u,
                                   const PlantParams& params) {
    const DriftVector f = drift_field(e, x);
    const double inv_tb = 1.0 / params.aero.pitch_time_constant;

    PlantState::Packed dx{};
    for (int i = 0; i < 12; ++i) dx[static_cast<std::size_t>(i)] = f[static_cast<std::size_t>(i)];
    dx[0] += inv_tb * u.delta_beta;
    dx[1] -= inv_tb * u.delta_beta;
    const Vec3 di1 = e.mach[0].inductance_inv * u.voltages1;
    const Vec3 di2 = e.mach[1].inductance_inv * u.voltages2;
    for (int j = 0; j < 3; ++j) {
        dx[static_cast<std::size_t>(4 + j)] += di1[static_cast<std::size_t>(j)];
        dx[static_cast<std::size_t>(8 + j)] += di2[static_cast<std::size_t>(j)];
    }
    dx[12] = params.machine.pole_pairs * x.omega1;
    dx[13] = params.machine.pole_pairs * x.omega2;
    return dx;
}

PlantState::Packed full_derivative(const PlantState& x, const PlantInput& u, double t,
                                   const machine::FaultSpec& fault, const aero::WindSample& wind,
                                   const PlantParams& params) {
    return full_derivative(evaluate(x, t, fault, wind, params), x, u, params);
}

}  // namespace twt::plant

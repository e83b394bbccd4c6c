#include "twt/control.hpp"

#include <cmath>

#include "twt/errors.hpp"

namespace twt::control {

namespace {

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

struct ChannelGains {
    double K = 0.0;
    double eps = 0.0;
};

std::array<ChannelGains, 7> canonical_gains(const ControllerGains& g) {
    return {{{g.K_psi, g.eps_psi},
             {g.K_omega1, g.eps_omega1},
             {g.K_id1, g.eps_id1},
             {g.K_ih1, g.eps_ih1},
             {g.K_omega2, g.eps_omega2},
             {g.K_id2, g.eps_id2},
             {g.K_ih2, g.eps_ih2}}};
}

}  // namespace

void References::validate() const {
    if (!(omega_ref1 > 0.0) || !(omega_ref2 > 0.0))
        throw ConfigError("references.omega_ref must be > 0");
}

void ControllerGains::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0)) throw ConfigError(std::string("controller.") + name + " must be > 0");
    };
    positive(K_psi, "K_psi");
    positive(K_omega1, "K_omega1");
    positive(K_id1, "K_id1");
    positive(K_ih1, "K_ih1");
    positive(K_omega2, "K_omega2");
    positive(K_id2, "K_id2");
    positive(K_ih2, "K_ih2");
    if (!(delta > 1.0)) throw ConfigError("controller.delta must be > 1");
    positive(eps_psi, "eps_psi");
    positive(eps_omega1, "eps_omega1");
    positive(eps_id1, "eps_id1");
    positive(eps_ih1, "eps_ih1");
    positive(eps_omega2, "eps_omega2");
    positive(eps_id2, "eps_id2");
    positive(eps_ih2, "eps_ih2");
    positive(psi_surface[0], "surface_psi[0]");
    positive(psi_surface[1], "surface_psi[1]");
    positive(omega_surface[0], "surface_omega[0]");
    positive(passive_id_boost, "passive_id_boost");
}

YawTarget resolve_yaw_target(const References& refs, const aero::WindSample& wind) {
    if (refs.fixed_yaw_target) return {*refs.fixed_yaw_target, 0.0, 0.0, 0.0};
    return {wind.direction, wind.direction_rate, wind.direction_accel, wind.direction_jerk};
}

OutputVector outputs(const plant::PlantState& x, const References& refs,
                     const aero::WindSample& wind) {
    const YawTarget tgt = resolve_yaw_target(refs, wind);
    const machine::DqCurrents dq1 = machine::dq_currents(x.currents1, x.theta_e1);
    const machine::DqCurrents dq2 = machine::dq_currents(x.currents2, x.theta_e2);
    OutputVector y;
    y.yaw_error = x.psi - tgt.angle;
    y.id1 = dq1.d;
    y.omega1_error = x.omega1 - refs.omega_ref1;
    y.ih1 = dq1.h;
    y.id2 = dq2.d;
    y.omega2_error = x.omega2 - refs.omega_ref2;
    y.ih2 = dq2.h;
    return y;
}

double sliding_variable(std::span<const double> chain, std::span<const double> coeffs) {
    double s = chain[coeffs.size()];
    for (std::size_t j = 0; j < coeffs.size(); ++j) s += coeffs[j] * chain[j];
    return s;
}

double homogeneity_exponent(std::span<const double> z_window, double delta, double eps) {
    double saturation = 0.0;
    for (double z : z_window) {
        const double a = std::abs(z);
        saturation += a / (a + eps);
    }
    return std::max(1.0 - delta * saturation, 0.0);
}

double stabilizer_term(double sigma, double exponent, double gain) {
    return -gain * std::pow(std::abs(sigma), exponent) * sign(sigma);
}

Vec7 stabilizer(const Vec7& sigma, const Vec7& exponents, const Vec7& gains) {
    Vec7 z{};
    for (std::size_t k = 0; k < 7; ++k) z[k] = stabilizer_term(sigma[k], exponents[k], gains[k]);
    return z;
}

namespace {

/// Drift part of dGamma_a/dt for one turbine.
double aero_torque_rate_drift(const plant::PlantEval& e, int m) {
    const plant::TurbineEval& tb = e.turbine[m];
    return tb.dtorque_dlambda * tb.lambda_dot_drift + tb.dtorque_dbeta * tb.beta_dot_drift +
           tb.dtorque_dw * e.w_rate;
}

/// Drift part of the second Omega derivative for one machine (canonical
/// Omega rows of Lambda).
double omega_row_drift(const plant::PlantEval& e, int m, const machine::MachineParams& mp) {
    const plant::MachineEval& me = e.mach[m];
    const plant::TurbineEval& tb = e.turbine[m];
    const double torque_em_rate =
        me.dtorque_did * me.id_rate_drift + me.dtorque_diq * me.iq_rate_drift;
    return (aero_torque_rate_drift(e, m) - mp.viscous_friction * tb.omega_dot - torque_em_rate) /
           mp.inertia;
}

}  // namespace

Vec7 lambda_vector(const plant::PlantEval& e, const plant::PlantState& x, const References& refs,
                   const plant::PlantParams& params) {
    (void)x;
    const YawTarget tgt = resolve_yaw_target(refs, e.wind);
    const aero::AeroParams& ap = params.aero;

    Vec7 lam{};
    lam[kChPsi] = (-ap.yaw_friction * e.psi_ddot +
                   ap.lever_arm * (e.turbine[0].drag_rate_drift - e.turbine[1].drag_rate_drift)) /
                      ap.yaw_inertia -
                  tgt.jerk;
    lam[kChOmega1] = omega_row_drift(e, 0, params.machine);
    lam[kChId1] = e.mach[0].id_rate_drift;
    lam[kChIh1] = e.mach[0].ih_rate_drift;
    lam[kChOmega2] = omega_row_drift(e, 1, params.machine);
    lam[kChId2] = e.mach[1].id_rate_drift;
    lam[kChIh2] = e.mach[1].ih_rate_drift;
    return lam;
}

Vec7 lambda_vector(const plant::PlantState& x, double t, const machine::FaultSpec& fault,
                   const aero::WindSample& wind, const References& refs,
                   const plant::PlantParams& params) {
    return lambda_vector(plant::evaluate(x, t, fault, wind, params), x, refs, params);
}

Mat7 theta_matrix(const plant::PlantEval& e, const plant::PlantParams& params) {
    const aero::AeroParams& ap = params.aero;
    const double J = params.machine.inertia;
    Mat7 th;

    th(kChPsi, 0) = ap.lever_arm * e.C * (e.turbine[0].B + e.turbine[1].B) /
                    (ap.yaw_inertia * ap.pitch_time_constant);

    for (int m = 0; m < 2; ++m) {
        const plant::MachineEval& me = e.mach[m];
        const Mat3 pl = me.park * me.inductance_inv;
        const int rowOmega = (m == 0) ? kChOmega1 : kChOmega2;
        const int rowId = (m == 0) ? kChId1 : kChId2;
        const int rowIh = (m == 0) ? kChIh1 : kChIh2;
        const int col0 = 1 + 3 * m;
        const double pitch_sign = (m == 0) ? 1.0 : -1.0;

        th(rowOmega, 0) =
            pitch_sign * e.turbine[m].dtorque_dbeta / (J * ap.pitch_time_constant);
        for (int j = 0; j < 3; ++j) {
            th(rowOmega, col0 + j) = -(me.dtorque_did * pl(0, j) + me.dtorque_diq * pl(1, j)) / J;
            th(rowId, col0 + j) = pl(0, j);
            th(rowIh, col0 + j) = pl(2, j);
        }
    }

    if (cond1(th) > kDecouplingCondLimit)
        throw SingularDecoupling("decoupling matrix condition number exceeds guard");
    return th;
}

Mat7 theta_matrix(const plant::PlantState& x, double t, const machine::FaultSpec& fault,
                  const aero::WindSample& wind, const plant::PlantParams& params) {
    return theta_matrix(plant::evaluate(x, t, fault, wind, params), params);
}

namespace {

struct ActiveChains {
    std::array<std::array<double, 3>, 7> values{};  // canonical, padded with zeros
};

ActiveChains build_chains(const plant::PlantEval& e, const plant::PlantState& x,
                          const References& refs) {
    const YawTarget tgt = resolve_yaw_target(refs, e.wind);
    ActiveChains c;
    c.values[kChPsi] = {x.psi - tgt.angle, x.psi_dot - tgt.rate, e.psi_ddot - tgt.accel};
    c.values[kChOmega1] = {x.omega1 - refs.omega_ref1, e.turbine[0].omega_dot, 0.0};
    c.values[kChId1] = {e.mach[0].id, 0.0, 0.0};
    c.values[kChIh1] = {e.mach[0].ih, 0.0, 0.0};
    c.values[kChOmega2] = {x.omega2 - refs.omega_ref2, e.turbine[1].omega_dot, 0.0};
    c.values[kChId2] = {e.mach[1].id, 0.0, 0.0};
    c.values[kChIh2] = {e.mach[1].ih, 0.0, 0.0};
    return c;
}

}  // namespace

ActiveEval active_control_eval(const plant::PlantState& x, double t,
                               const machine::FaultSpec& fault, const aero::WindSample& wind,
                               const References& refs, const ControllerGains& gains,
                               const plant::PlantParams& params) {
    const plant::PlantEval e = plant::evaluate(x, t, fault, wind, params);
    const ActiveChains chains = build_chains(e, x, refs);
    const auto cg = canonical_gains(gains);

    ActiveEval out;
    out.chains = chains.values;

    // Stack the chain coordinates; windows follow the canonical channels.
    std::array<double, 11> z{};
    std::array<std::pair<int, int>, 7> window{};  // offset, length per channel
    int pos = 0;
    for (int k = 0; k < 7; ++k) {
        const int n = kCanonicalRelDeg[static_cast<std::size_t>(k)];
        window[static_cast<std::size_t>(k)] = {pos, n};
        for (int j = 0; j < n; ++j)
            z[static_cast<std::size_t>(pos + j)] =
                chains.values[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
        pos += n;
    }

    for (int k = 0; k < 7; ++k) {
        const auto& ch = chains.values[static_cast<std::size_t>(k)];
        const int n = kCanonicalRelDeg[static_cast<std::size_t>(k)];
        std::span<const double> chain(ch.data(), static_cast<std::size_t>(n));
        std::span<const double> coeffs;
        if (n == 3) coeffs = std::span<const double>(gains.psi_surface);
        if (n == 2) coeffs = std::span<const double>(gains.omega_surface);
        out.sigma[static_cast<std::size_t>(k)] = sliding_variable(chain, coeffs);
        const auto [off, len] = window[static_cast<std::size_t>(k)];
        out.exponents[static_cast<std::size_t>(k)] = homogeneity_exponent(
            std::span<const double>(z.data() + off, static_cast<std::size_t>(len)), gains.delta,
            cg[static_cast<std::size_t>(k)].eps);
        out.zbar[static_cast<std::size_t>(k)] =
            stabilizer_term(out.sigma[static_cast<std::size_t>(k)],
                            out.exponents[static_cast<std::size_t>(k)],
                            cg[static_cast<std::size_t>(k)].K);
    }

    out.lambda = lambda_vector(e, x, refs, params);
    out.theta = theta_matrix(e, params);

    Mat7 lu = out.theta;
    std::array<int, 7> perm{};
    if (!lu_factor(lu, perm)) throw SingularDecoupling("decoupling matrix is singular");
    Vec7 rhs{};
    for (std::size_t k = 0; k < 7; ++k) rhs[k] = out.zbar[k] - out.lambda[k];
    const Vec7 u = lu_solve(lu, perm, rhs);
    out.input = plant::PlantInput::unpack(u);
    return out;
}

plant::PlantInput active_control(const plant::PlantState& x, double t,
                                 const machine::FaultSpec& fault, const aero::WindSample& wind,
                                 const References& refs, const ControllerGains& gains,
                                 const plant::PlantParams& params) {
    return active_control_eval(x, t, fault, wind, refs, gains, params).input;
}

PassiveEval passive_control_eval(const plant::PlantState& x, double t,
                                 const aero::WindSample& wind, const References& refs,
                                 const ControllerGains& gains, const plant::PlantParams& params) {
    // The passive law is blind to the fault: every model quantity is built
    // from the healthy machine.
    const plant::PlantEval e =
        plant::evaluate(x, t, machine::FaultSpec::healthy(), wind, params);
    const machine::MachineParams& mp = params.machine;
    const aero::AeroParams& ap = params.aero;
    const YawTarget tgt = resolve_yaw_target(refs, wind);

    // Canonical passive channels: (psi, Omega1, id1, Omega2, id2).
    std::array<std::array<double, 3>, 5> chains{};
    chains[0] = {x.psi - tgt.angle, x.psi_dot - tgt.rate, e.psi_ddot - tgt.accel};
    chains[1] = {x.omega1 - refs.omega_ref1, e.turbine[0].omega_dot, 0.0};
    chains[2] = {e.mach[0].id, 0.0, 0.0};
    chains[3] = {x.omega2 - refs.omega_ref2, e.turbine[1].omega_dot, 0.0};
    chains[4] = {e.mach[1].id, 0.0, 0.0};
    constexpr std::array<int, 5> rel_deg{3, 2, 1, 2, 1};
    const std::array<ChannelGains, 5> cg{{{gains.K_psi, gains.eps_psi},
                                          {gains.K_omega1, gains.eps_omega1},
                                          {gains.K_id1 * gains.passive_id_boost, gains.eps_id1},
                                          {gains.K_omega2, gains.eps_omega2},
                                          {gains.K_id2 * gains.passive_id_boost, gains.eps_id2}}};

    PassiveEval out;
    std::array<double, 9> z{};
    int pos = 0;
    for (int k = 0; k < 5; ++k) {
        const int n = rel_deg[static_cast<std::size_t>(k)];
        for (int j = 0; j < n; ++j)
            z[static_cast<std::size_t>(pos + j)] =
                chains[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
        std::span<const double> chain(chains[static_cast<std::size_t>(k)].data(),
                                      static_cast<std::size_t>(n));
        std::span<const double> coeffs;
        if (n == 3) coeffs = std::span<const double>(gains.psi_surface);
        if (n == 2) coeffs = std::span<const double>(gains.omega_surface);
        out.sigma[static_cast<std::size_t>(k)] = sliding_variable(chain, coeffs);
        out.exponents[static_cast<std::size_t>(k)] = homogeneity_exponent(
            std::span<const double>(z.data() + pos, static_cast<std::size_t>(n)), gains.delta,
            cg[static_cast<std::size_t>(k)].eps);
        out.zbar[static_cast<std::size_t>(k)] =
            stabilizer_term(out.sigma[static_cast<std::size_t>(k)],
                            out.exponents[static_cast<std::size_t>(k)],
                            cg[static_cast<std::size_t>(k)].K);
        pos += n;
    }

    // Drift rows, healthy model.
    out.lambda[0] = (-ap.yaw_friction * e.psi_ddot +
                     ap.lever_arm * (e.turbine[0].drag_rate_drift - e.turbine[1].drag_rate_drift)) /
                        ap.yaw_inertia -
                    tgt.jerk;
    out.lambda[1] = omega_row_drift(e, 0, mp);
    out.lambda[2] = e.mach[0].id_rate_drift;
    out.lambda[3] = omega_row_drift(e, 1, mp);
    out.lambda[4] = e.mach[1].id_rate_drift;

    // Decoupling in dq coordinates: columns (delta_beta, vd1, vq1, vd2, vq2).
    SquareMat<5>& th = out.theta;
    th(0, 0) = ap.lever_arm * e.C * (e.turbine[0].B + e.turbine[1].B) /
               (ap.yaw_inertia * ap.pitch_time_constant);
    for (int m = 0; m < 2; ++m) {
        const plant::MachineEval& me = e.mach[m];
        const int rowOmega = (m == 0) ? 1 : 3;
        const int rowId = (m == 0) ? 2 : 4;
        const int col = 1 + 2 * m;
        const double pitch_sign = (m == 0) ? 1.0 : -1.0;
        th(rowOmega, 0) = pitch_sign * e.turbine[m].dtorque_dbeta / (mp.inertia * ap.pitch_time_constant);
        th(rowOmega, col) = -me.dtorque_did / (mp.inertia * mp.Ld);
        th(rowOmega, col + 1) = -me.dtorque_diq / (mp.inertia * mp.Lq);
        th(rowId, col) = 1.0 / mp.Ld;
    }
    if (cond1(th) > kDecouplingCondLimit)
        throw SingularDecoupling("passive decoupling condition number exceeds guard");

    SquareMat<5> lu = th;
    std::array<int, 5> perm{};
    if (!lu_factor(lu, perm)) throw SingularDecoupling("passive decoupling matrix is singular");
    std::array<double, 5> rhs{};
    for (std::size_t k = 0; k < 5; ++k) rhs[k] = out.zbar[k] - out.lambda[k];
    out.dq_command = lu_solve(lu, perm, rhs);

    out.input.delta_beta = out.dq_command[0];
    const Vec3 dq1{out.dq_command[1], out.dq_command[2], 0.0};
    const Vec3 dq2{out.dq_command[3], out.dq_command[4], 0.0};
    out.input.voltages1 = machine::park_transform(x.theta_e1).transposed() * dq1;
    out.input.voltages2 = machine::park_transform(x.theta_e2).transposed() * dq2;
    return out;
}

plant::PlantInput passive_control(const plant::PlantState& x, double t,
                                  const aero::WindSample& wind, const References& refs,
                                  const ControllerGains& gains, const plant::PlantParams& params) {
    return passive_control_eval(x, t, wind, refs, gains, params).input;
}

}  // namespace twt::control

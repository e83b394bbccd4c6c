#pragma once

#include "twt/mat.hpp"

namespace twt::machine {

enum class Phase : int { A = 0, B = 1, C = 2 };

/// Electrical and mechanical constants of one PMSM.
///
/// The abc inductance profile is the standard salient two-harmonic form
///   L_a     = Ls0 + Ls2*cos(2*theta_e)          (b, c shifted by -+2pi/3)
///   M_ab    = -Ms0 + Ls2*cos(2*theta_e - 2pi/3) (others cycled)
/// whose Park transform is diag(Ld, Lq, Lh) with
///   Ld = Ls0 + Ms0 + 1.5*Ls2,  Lq = Ls0 + Ms0 - 1.5*Ls2,  Lh = Ls0 - 2*Ms0.
struct MachineParams {
    double stator_resistance = 0.5;   ///< rs (ohm)
    double magnet_flux = 0.2;         ///< phi_f (Wb)
    int pole_pairs = 3;               ///< p
    double Ld = 8e-3;                 ///< d-axis inductance (H)
    double Lq = 4e-3;                 ///< q-axis inductance (H)
    double Ls0 = 0.0;                 ///< abc self-inductance constant (H)
    double Ls2 = 0.0;                 ///< abc saliency amplitude (H)
    double Ms0 = 0.0;                 ///< abc mutual constant (H)
    double inertia = 0.5;             ///< J (kg*m^2)
    double viscous_friction = 0.01;   ///< fv (N*m*s/rad)

    /// Calibrates Ls0, Ms0, Ls2 so the Park-transformed profile reproduces
    /// (Ld, Lq) with homopolar inductance Lh.
    static MachineParams from_dq(double rs, double phi_f, int pole_pairs, double Ld, double Lq,
                                 double Lh, double inertia, double viscous_friction);

    double homopolar_inductance() const { return Ls0 - 2.0 * Ms0; }

    void validate() const;
};

/// Inter-turn short-circuit fault description.
struct FaultSpec {
    double severity = 0.0;      ///< mu_bar in [0, 1)
    int turbine = 1;            ///< faulted turbine, 1 or 2
    Phase phase = Phase::B;
    double onset_time = 0.0;    ///< s

    bool active_at(double t) const { return severity > 0.0 && t >= onset_time; }
    /// Effective severity seen by machine `turbine_index` (1-based) at time t.
    double severity_for(int turbine_index, double t) const {
        return (turbine_index == turbine && active_at(t)) ? severity : 0.0;
    }
    void validate() const;

    static FaultSpec healthy() { return FaultSpec{}; }
};

struct ElectricalState {
    Vec3 currents{};   ///< [ia, ib, ic] (A)
    double theta_e = 0.0;
    double omega = 0.0;
};

struct DqCurrents {
    double d = 0.0;
    double q = 0.0;
    double h = 0.0;
};

/// Healthy salient inductance matrix L_s(theta_e); symmetric, pi-periodic
/// saliency terms.
Mat3 inductance_matrix(double theta_e, const MachineParams& params);

/// dL_s/dtheta_e.
Mat3 inductance_matrix_dtheta(double theta_e, const MachineParams& params);

/// Applies the inter-turn short-circuit pattern: every entry of the faulted
/// phase's row and column scaled once by (1 - mu), diagonal included.
Mat3 fault_scale(const Mat3& healthy, double severity, Phase phase);

/// L_f(theta_e, mu). Equals the healthy matrix at mu = 0. Throws
/// InvalidSeverity outside [0, 1).
Mat3 fault_inductance_matrix(double theta_e, double severity, Phase phase,
                             const MachineParams& params);

/// Magnet flux vector E_m = phi_f * [cos, cos(-2pi/3 shift), cos(+2pi/3 shift)].
Vec3 emf_vector(double theta_e, const MachineParams& params);

/// dE_m/dt = -p*Omega*phi_f * [sin, ...].
Vec3 emf_rate(double theta_e, double omega, const MachineParams& params);

/// Power-invariant Park matrix; P * P^T = I.
Mat3 park_transform(double theta_e);

/// (i_d, i_q, i_h) = P(theta_e) * I; i_h = sqrt(1/3) * (ia + ib + ic).
DqCurrents dq_currents(const Vec3& currents, double theta_e);

/// Gamma_em = p*(Ld - Lq)*id*iq + p*phi_f*iq.
double electromagnetic_torque(double id, double iq, const MachineParams& params);

/// Omega_dot = (Gamma_a - Gamma_em - fv*Omega) / J.
double rotor_acceleration(double torque_aero, double torque_em, double omega,
                          const MachineParams& params);

/// Condition-number guard for the effective inductance inversion.
inline constexpr double kInductanceCondLimit = 1e10;

/// dI/dt = L^-1 * (V - R_eff I - p*Omega*(dL/dtheta) I - dE_eff/dt) with the
/// faulted phase's resistance and EMF scaled by (1 - mu). Throws
/// SingularInductance past the conditioning guard.
Vec3 electrical_derivative(const ElectricalState& state, const Vec3& voltages, double severity,
                           Phase phase, const MachineParams& params);

}  // namespace twt::machine

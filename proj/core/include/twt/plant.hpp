#pragma once

#include <array>

#include "twt/aero.hpp"
#include "twt/machine.hpp"
#include "twt/mat.hpp"

namespace twt::plant {

/// Full simulation state. The first 12 entries follow the published state
/// ordering x = [b1 b2 psi psi_dot ia1 ib1 ic1 W1 ia2 ib2 ic2 W2]; the two
/// electrical angles are carried as integrated bookkeeping states
/// (theta_e_dot = p * Omega).
struct PlantState {
    double beta1 = 0.0;
    double beta2 = 0.0;
    double psi = 0.0;
    double psi_dot = 0.0;
    Vec3 currents1{};
    double omega1 = 0.0;
    Vec3 currents2{};
    double omega2 = 0.0;
    double theta_e1 = 0.0;
    double theta_e2 = 0.0;

    static constexpr int kSize = 14;
    using Packed = std::array<double, kSize>;

    Packed pack() const;
    static PlantState unpack(const Packed& v);

    const Vec3& currents(int machine) const { return machine == 0 ? currents1 : currents2; }
    double omega(int machine) const { return machine == 0 ? omega1 : omega2; }
    double theta_e(int machine) const { return machine == 0 ? theta_e1 : theta_e2; }
    double beta(int machine) const { return machine == 0 ? beta1 : beta2; }
};

/// Input vector u = [delta_beta van1 vbn1 vcn1 van2 vbn2 vcn2].
struct PlantInput {
    double delta_beta = 0.0;
    Vec3 voltages1{};
    Vec3 voltages2{};

    static constexpr int kSize = 7;
    using Packed = std::array<double, kSize>;

    Packed pack() const;
    static PlantInput unpack(const Packed& v);
};

/// Plant-level constants: aerodynamics, the (identical) machines, and the
/// pitch reference that forces the beta1 + beta2 internal dynamics.
struct PlantParams {
    aero::AeroParams aero;
    aero::CdPolynomial cd;
    machine::MachineParams machine;
    double pitch_reference = 0.1;  ///< beta_ref (rad)

    void validate() const;
};

/// Per-machine quantities shared by the vector field and the control law.
struct MachineEval {
    double severity = 0.0;       ///< effective mu at this instant
    machine::Phase phase = machine::Phase::B;
    Mat3 inductance;             ///< effective L (fault-scaled)
    Mat3 inductance_inv;
    Mat3 inductance_dtheta;      ///< fault-scaled dL/dtheta_e
    Mat3 park;
    Vec3 current_drift{};        ///< dI/dt at V = 0
    double id = 0.0, iq = 0.0, ih = 0.0;
    double torque_em = 0.0;
    double dtorque_did = 0.0;    ///< p*(Ld-Lq)*iq
    double dtorque_diq = 0.0;    ///< p*phi_f + p*(Ld-Lq)*id
    double id_rate_drift = 0.0;  ///< d(id)/dt at V = 0
    double iq_rate_drift = 0.0;
    double ih_rate_drift = 0.0;
};

/// Per-turbine aerodynamic quantities and their drift-direction rates.
struct TurbineEval {
    double lambda = 0.0;
    double cp = 0.0, dcp_dlambda = 0.0, dcp_dbeta = 0.0;
    double cd = 0.0;
    double B = 0.0;              ///< B(lambda), the pitch gain of Cd
    double dcd_dlambda = 0.0;    ///< A'(lambda) + B'(lambda)*beta
    double drag = 0.0;
    double torque_aero = 0.0;
    double dtorque_dlambda = 0.0;
    double dtorque_dbeta = 0.0;
    double dtorque_dw = 0.0;
    double omega_dot = 0.0;
    double beta_dot_drift = 0.0;   ///< beta rate at delta_beta = 0
    double lambda_dot_drift = 0.0;
    double drag_rate_drift = 0.0;  ///< dF/dt at delta_beta = 0
};

/// One full evaluation of the coupled model at (x, t): everything the drift
/// field, the input matrix, and the linearizing control need.
struct PlantEval {
    aero::WindSample wind;
    double w = 0.0;       ///< effective wind Vv*cos(psi - alpha)
    double w_rate = 0.0;
    double C = 0.0;       ///< drag prefactor (pi*rho/2)*Rp^2*w^2
    double C_rate = 0.0;
    double psi_ddot = 0.0;
    TurbineEval turbine[2];
    MachineEval mach[2];
};

/// Evaluates the model with the fault resolved at time t (inactive before
/// onset). Throws SingularOrientation / DegenerateTipSpeed /
/// SingularInductance on degenerate states.
PlantEval evaluate(const PlantState& x, double t, const machine::FaultSpec& fault,
                   const aero::WindSample& wind, const PlantParams& params);

using DriftVector = std::array<double, 12>;
using InputMatrix = std::array<std::array<double, 7>, 12>;

DriftVector drift_field(const PlantEval& eval, const PlantState& x);
DriftVector drift_field(const PlantState& x, double t, const machine::FaultSpec& fault,
                        const aero::WindSample& wind, const PlantParams& params);

/// g(x, t): column 0 reaches only the pitch rows (+-1/T_beta); columns 1-3
/// and 4-6 are the two inverse-inductance blocks. Rows psi, psi_dot, W1, W2
/// are identically zero.
InputMatrix input_matrix(const PlantEval& eval, const PlantParams& params);
InputMatrix input_matrix(const PlantState& x, double t, const machine::FaultSpec& fault,
                         const PlantParams& params);

/// f + g*u, extended with the electrical-angle bookkeeping rates.
PlantState::Packed full_derivative(const PlantState& x, const PlantInput& u, double t,
                                   const machine::FaultSpec& fault, const aero::WindSample& wind,
                                   const PlantParams& params);
PlantState::Packed full_derivative(const PlantEval& eval, const PlantState& x,
                                   const PlantInput& u, const PlantParams& params);

}  // namespace twt::plant

#pragma once

#include <array>

namespace twt::aero {

/// Aerodynamic and yaw-structure constants of the twin turbine.
struct AeroParams {
    double air_density = 1.25;        ///< rho (kg/m^3)
    double blade_radius = 1.0;        ///< Rp (m)
    double yaw_inertia = 10.0;        ///< dr (kg*m^2)
    double yaw_friction = 5.0;        ///< fr (N*m*s/rad)
    double lever_arm = 2.0;           ///< l, distance between horizontal and vertical axes (m)
    double pitch_time_constant = 0.1; ///< T_beta (s)

    /// All fields must be strictly positive.
    void validate() const;
};

/// Cubic coefficients of the drag-coefficient split Cd(lambda, beta) =
/// A(lambda) + B(lambda) * beta. Defaults are the published values.
struct CdPolynomial {
    std::array<double, 4> a{0.25382, -0.1369, 0.04345, -0.00263};
    std::array<double, 4> b{-0.008608, 0.0063, -0.0015, 0.000118};

    double A(double lambda) const;
    double B(double lambda) const;
    double dA(double lambda) const;
    double dB(double lambda) const;
};

/// Wind state at one instant, with the analytic time derivatives the
/// control chains need. Profiles that cannot supply a derivative report 0.
struct WindSample {
    double speed = 0.0;           ///< Vv (m/s)
    double direction = 0.0;       ///< alpha (rad)
    double speed_rate = 0.0;      ///< dVv/dt
    double direction_rate = 0.0;  ///< dalpha/dt
    double direction_accel = 0.0;
    double direction_jerk = 0.0;
};

/// Below this effective wind (m/s) the tip speed ratio is undefined.
inline constexpr double kEffectiveWindFloor = 1e-3;
/// Lambda floor applied inside the aerodynamic torque to avoid 1/lambda blowup.
inline constexpr double kTipSpeedFloor = 1e-3;

/// Vv * cos(psi - alpha). Throws SingularOrientation below the floor.
double effective_wind(double wind_speed, double psi, double alpha);

/// lambda = Rp * Omega / (Vv * cos(psi - alpha)).
double tip_speed_ratio(double blade_radius, double omega, double wind_speed, double psi,
                       double alpha);

/// Cd = A(lambda) + B(lambda) * beta.
double drag_coefficient(double lambda, double beta, const CdPolynomial& poly);

/// F = (pi*rho/2) * Cd * Rp^2 * (Vv cos(psi-alpha))^2.
double drag_force(const WindSample& wind, double psi, double cd, const AeroParams& params);

/// P = (pi*rho/2) * Cp * Rp^2 * (Vv cos(psi-alpha))^3.
double mechanical_power(const WindSample& wind, double psi, double cp, const AeroParams& params);

/// Torque = P / Omega = (pi*rho/(2*lambda)) * Cp * Rp^3 * (Vv cos(psi-alpha))^2.
/// lambda in (0, kTipSpeedFloor) is floored; lambda <= 0 throws DegenerateTipSpeed.
double aerodynamic_torque(const WindSample& wind, double psi, double lambda, double cp,
                          const AeroParams& params);

/// Power coefficient surface and its partial derivatives. The published
/// model defers the Cp surface to an external reference without a formula,
/// so the standard exponential parametrization stands in:
///   Cp = c1*(c2/li - c3*beta - c4)*exp(-c5/li) + c6*lambda,
///   1/li = 1/(lambda + 0.08*beta) - 0.035/(beta^3 + 1).
/// beta is clamped to [-0.5, 2] to stay clear of the beta = -1 pole, and the
/// result is clamped at 0 (partials are 0 inside either clamp).
struct CpEval {
    double value = 0.0;
    double dlambda = 0.0;
    double dbeta = 0.0;
};
CpEval power_coefficient_eval(double lambda, double beta);
double power_coefficient(double lambda, double beta);

/// psi_ddot = (-fr * psi_dot + (F1 - F2) * l) / dr.
double yaw_acceleration(double psi_dot, double force1, double force2, const AeroParams& params);

/// beta_dot = (beta_ref + sign * delta_beta - beta) / T_beta, sign = +1 for
/// turbine 1 and -1 for turbine 2. The beta_ref forcing makes the pitch sum
/// beta1 + beta2 follow its first-order reference dynamics exactly.
double pitch_rate(double beta, double beta_ref, double delta_beta, double pitch_time_constant,
                  int sign);

}  // namespace twt::aero

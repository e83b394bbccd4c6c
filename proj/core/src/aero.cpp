#include "twt/aero.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "twt/errors.hpp"

namespace twt::aero {

namespace {
constexpr double kPi = std::numbers::pi;

double horner3(const std::array<double, 4>& c, double x) {
    return c[0] + x * (c[1] + x * (c[2] + x * c[3]));
}
double horner3_deriv(const std::array<double, 4>& c, double x) {
    return c[1] + x * (2.0 * c[2] + x * 3.0 * c[3]);
}
}  // namespace

void AeroParams::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0)) throw ConfigError(std::string("aero.") + name + " must be > 0");
    };
    positive(air_density, "rho");
    positive(blade_radius, "Rp");
    positive(yaw_inertia, "dr");
    positive(yaw_friction, "fr");
    positive(lever_arm, "l");
    positive(pitch_time_constant, "T_beta");
}

double CdPolynomial::A(double lambda) const { return horner3(a, lambda); }
double CdPolynomial::B(double lambda) const { return horner3(b, lambda); }
double CdPolynomial::dA(double lambda) const { return horner3_deriv(a, lambda); }
double CdPolynomial::dB(double lambda) const { return horner3_deriv(b, lambda); }

double effective_wind(double wind_speed, double psi, double alpha) {
    const double w = wind_speed * std::cos(psi - alpha);
    if (std::abs(w) < kEffectiveWindFloor)
        throw SingularOrientation("effective wind Vv*cos(psi-alpha) below floor");
    return w;
}

double tip_speed_ratio(double blade_radius, double omega, double wind_speed, double psi,
                       double alpha) {
    return blade_radius * omega / effective_wind(wind_speed, psi, alpha);
}

double drag_coefficient(double lambda, double beta, const CdPolynomial& poly) {
    return poly.A(lambda) + poly.B(lambda) * beta;
}

double drag_force(const WindSample& wind, double psi, double cd, const AeroParams& params) {
    const double w = wind.speed * std::cos(psi - wind.direction);
    return 0.5 * kPi * params.air_density * cd * params.blade_radius * params.blade_radius * w * w;
}

double mechanical_power(const WindSample& wind, double psi, double cp, const AeroParams& params) {
    const double w = wind.speed * std::cos(psi - wind.direction);
    return 0.5 * kPi * params.air_density * cp * params.blade_radius * params.blade_radius * w * w *
           w;
}

double aerodynamic_torque(const WindSample& wind, double psi, double lambda, double cp,
                          const AeroParams& params) {
    if (lambda <= 0.0) throw DegenerateTipSpeed("tip speed ratio must be positive");
    const double lam = std::max(lambda, kTipSpeedFloor);
    const double w = wind.speed * std::cos(psi - wind.direction);
    const double r = params.blade_radius;
    return 0.5 * kPi * params.air_density / lam * cp * r * r * r * w * w;
}

namespace {
// Standard exponential Cp coefficient set.
constexpr double c1 = 0.5176;
constexpr double c2 = 116.0;
constexpr double c3 = 0.4;
constexpr double c4 = 5.0;
constexpr double c5 = 21.0;
constexpr double c6 = 0.0068;
constexpr double kBetaLo = -0.5;
constexpr double kBetaHi = 2.0;
// The fit is meaningless past moderate tip speed ratios (the c6*lambda tail
// grows without bound); extrapolate flat instead.
constexpr double kLambdaHi = 20.0;
}  // namespace

CpEval power_coefficient_eval(double lambda, double beta) {
    CpEval out;
    if (!(lambda > 0.0)) return out;
    const bool clamped_lambda = !(lambda < kLambdaHi);
    const double lc = clamped_lambda ? kLambdaHi : lambda;
    const bool clamped_beta = beta < kBetaLo || beta > kBetaHi;
    const double bc = std::clamp(beta, kBetaLo, kBetaHi);
    const double denom = lc + 0.08 * bc;
    if (denom <= 1e-9) return out;
    const double b3 = bc * bc * bc + 1.0;
    const double s = 1.0 / denom - 0.035 / b3;  // 1/lambda_i
    const double e = std::exp(-c5 * s);
    const double raw = c1 * (c2 * s - c3 * bc - c4) * e + c6 * lc;
    if (raw <= 0.0) return out;  // clamped region: value and partials 0
    out.value = raw;
    const double dcp_ds = c1 * e * (c2 - c5 * (c2 * s - c3 * bc - c4));
    const double ds_dlambda = -1.0 / (denom * denom);
    const double ds_dbeta = -0.08 / (denom * denom) + 0.105 * bc * bc / (b3 * b3);
    out.dlambda = clamped_lambda ? 0.0 : dcp_ds * ds_dlambda + c6;
    out.dbeta = clamped_beta ? 0.0 : dcp_ds * ds_dbeta - c1 * c3 * e;
    return out;
}

double power_coefficient(double lambda, double beta) {
    return power_coefficient_eval(lambda, beta).value;
}

double yaw_acceleration(double psi_dot, double force1, double force2, const AeroParams& params) {
    return (-params.yaw_friction * psi_dot + (force1 - force2) * params.lever_arm) /
           params.yaw_inertia;
}

double pitch_rate(double beta, double beta_ref, double delta_beta, double pitch_time_constant,
                  int sign) {
    return (beta_ref + sign * delta_beta - beta) / pitch_time_constant;
}

}  // namespace twt::aero

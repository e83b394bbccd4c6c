#pragma once

#include <array>
#include <optional>
#include <span>

#include "twt/plant.hpp"

namespace twt::control {

using Vec7 = std::array<double, 7>;
using Mat7 = SquareMat<7>;

/// Tracking references. When no fixed yaw target is set the controller
/// tracks the wind direction (and its profile derivatives).
struct References {
    std::optional<double> fixed_yaw_target;  ///< rad; default: track wind alpha
    double omega_ref1 = 80.0;                ///< rad/s
    double omega_ref2 = 80.0;
    double beta_ref = 0.1;                   ///< rad

    void validate() const;
};

struct YawTarget {
    double angle = 0.0;
    double rate = 0.0;
    double accel = 0.0;
    double jerk = 0.0;
};
YawTarget resolve_yaw_target(const References& refs, const aero::WindSample& wind);

/// Gains of the homogeneous stabilizer and the sliding-surface coefficients.
struct ControllerGains {
    double K_psi = 6.0;
    double K_omega1 = 280.0;
    double K_id1 = 3000.0;
    double K_ih1 = 3000.0;
    double K_omega2 = 280.0;
    double K_id2 = 3000.0;
    double K_ih2 = 3000.0;
    double delta = 2.0;          ///< homogeneity slope, > 1
    double eps_psi = 0.05;       ///< per-window regularization scalars, > 0
    double eps_omega1 = 1.0;
    double eps_id1 = 0.5;
    double eps_ih1 = 0.5;
    double eps_omega2 = 1.0;
    double eps_id2 = 0.5;
    double eps_ih2 = 0.5;
    std::array<double, 2> psi_surface{25.0, 10.0};  ///< sigma = ydd + c[1]*yd + c[0]*y
    std::array<double, 1> omega_surface{5.0};       ///< sigma = yd + c[0]*y
    double passive_id_boost = 6.0;  ///< robustification multiplier on K_id in the passive law

    void validate() const;
};

/// Controlled outputs in the published listing order, with relative degrees
/// (3, 1, 2, 1, 1, 2, 1) attached positionally.
struct OutputVector {
    double yaw_error = 0.0;     ///< psi - alpha
    double id1 = 0.0;
    double omega1_error = 0.0;  ///< Omega1 - ref
    double ih1 = 0.0;
    double id2 = 0.0;
    double omega2_error = 0.0;
    double ih2 = 0.0;

    static constexpr std::array<int, 7> kRelativeDegrees{3, 1, 2, 1, 1, 2, 1};

    std::array<double, 7> pack() const {
        return {yaw_error, id1, omega1_error, ih1, id2, omega2_error, ih2};
    }
};

OutputVector outputs(const plant::PlantState& x, const References& refs,
                     const aero::WindSample& wind);

/// Canonical channel order used by the stabilizer and the decoupling rows:
/// (psi, Omega1, id1, ih1, Omega2, id2, ih2). The published output listing
/// and the stabilizer listing disagree on the (Omega, id) order; everything
/// internal follows the stabilizer listing.
enum Channel : int {
    kChPsi = 0,
    kChOmega1,
    kChId1,
    kChIh1,
    kChOmega2,
    kChId2,
    kChIh2,
};
inline constexpr std::array<int, 7> kCanonicalRelDeg{3, 2, 1, 1, 2, 1, 1};

/// Linear sliding surface over one output chain (y, y', ..., y^(e-1)):
/// sigma = y^(e-1) + sum_j coeffs[j] * y^(j). Empty coeffs gives sigma = y.
double sliding_variable(std::span<const double> chain, std::span<const double> coeffs);

/// mu = max(1 - delta * sum_l |z_l| / (|z_l| + eps), 0) over one window.
double homogeneity_exponent(std::span<const double> z_window, double delta, double eps);

/// -K * |sigma|^mu * sign(sigma).
double stabilizer_term(double sigma, double exponent, double gain);

/// Componentwise homogeneous stabilizer in canonical order.
Vec7 stabilizer(const Vec7& sigma, const Vec7& exponents, const Vec7& gains);

/// Drift part of the stacked highest-order output derivatives, canonical
/// order. The printed appendix rows carry sign/pairing inconsistencies; the
/// rows here are derived from the model so that y^(eps) = Lambda + Theta u
/// holds exactly (the finite-difference suites check this).
Vec7 lambda_vector(const plant::PlantEval& eval, const plant::PlantState& x,
                   const References& refs, const plant::PlantParams& params);
Vec7 lambda_vector(const plant::PlantState& x, double t, const machine::FaultSpec& fault,
                   const aero::WindSample& wind, const References& refs,
                   const plant::PlantParams& params);

/// Condition-number guard for the decoupling solve.
inline constexpr double kDecouplingCondLimit = 1e8;

/// Input coefficient of the stacked highest-order output derivatives,
/// canonical order, columns (delta_beta, V1, V2). Zero where a channel has
/// no direct authority; throws SingularDecoupling past the guard.
Mat7 theta_matrix(const plant::PlantEval& eval, const plant::PlantParams& params);
Mat7 theta_matrix(const plant::PlantState& x, double t, const machine::FaultSpec& fault,
                  const aero::WindSample& wind, const plant::PlantParams& params);

/// Everything the active law computes at one state; exposed for the test
/// oracles.
struct ActiveEval {
    std::array<std::array<double, 3>, 7> chains{};  ///< per channel: y, y', y''
    Vec7 sigma{};
    Vec7 exponents{};
    Vec7 zbar{};
    Vec7 lambda{};
    Mat7 theta;
    plant::PlantInput input;
};

/// Active abc-frame fault-tolerant law: u = Theta^-1 (zbar - Lambda), built
/// with the estimated fault (the true severity stands in for its estimate).
ActiveEval active_control_eval(const plant::PlantState& x, double t,
                               const machine::FaultSpec& fault, const aero::WindSample& wind,
                               const References& refs, const ControllerGains& gains,
                               const plant::PlantParams& params);
plant::PlantInput active_control(const plant::PlantState& x, double t,
                                 const machine::FaultSpec& fault, const aero::WindSample& wind,
                                 const References& refs, const ControllerGains& gains,
                                 const plant::PlantParams& params);

/// Passive dq-frame baseline: the five-output healthy-model law (psi,
/// Omega1, id1, Omega2, id2) built with the healthy inductances regardless
/// of the fault; dq voltage commands are mapped back through the inverse
/// Park transform with zero homopolar component. K_id is multiplied by the
/// robustification boost.
struct PassiveEval {
    std::array<double, 5> sigma{};
    std::array<double, 5> exponents{};
    std::array<double, 5> zbar{};
    std::array<double, 5> lambda{};
    SquareMat<5> theta;
    std::array<double, 5> dq_command{};  ///< (delta_beta, vd1, vq1, vd2, vq2)
    plant::PlantInput input;
};
PassiveEval passive_control_eval(const plant::PlantState& x, double t,
                                 const aero::WindSample& wind, const References& refs,
                                 const ControllerGains& gains, const plant::PlantParams& params);
plant::PlantInput passive_control(const plant::PlantState& x, double t,
                                  const aero::WindSample& wind, const References& refs,
                                  const ControllerGains& gains, const plant::PlantParams& params);

}  // namespace twt::control

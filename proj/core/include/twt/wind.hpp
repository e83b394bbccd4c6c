#pragma once

#include <cstdint>
#include <vector>

#include "twt/aero.hpp"

namespace twt::sim {

/// Wind input generator. All kinds expose analytic time derivatives (zero
/// for the piecewise-constant kinds away from the switch instant); the
/// turbulent kind is a seeded sum of sinusoids, so same seed means the same
/// sequence, bit for bit.
class WindProfile {
public:
    enum class Kind { Constant, Step, Ramp, Turbulence };

    static WindProfile constant(double speed, double direction);
    static WindProfile step(double speed0, double direction0, double t_switch, double speed1,
                            double direction1);
    static WindProfile ramp(double speed0, double speed_rate, double direction0,
                            double direction_rate);
    /// Mean speed/direction plus n_modes sinusoidal speed modes with random
    /// frequency in [freq_lo, freq_hi] (rad/s) and random phase.
    static WindProfile turbulence(double mean_speed, double direction, double amplitude,
                                  int n_modes, double freq_lo, double freq_hi, std::uint64_t seed);

    aero::WindSample sample(double t) const;

    Kind kind() const { return kind_; }
    std::uint64_t seed() const { return seed_; }
    void reseed(std::uint64_t seed);

private:
    Kind kind_ = Kind::Constant;
    double speed0_ = 10.0;
    double direction0_ = 0.0;
    double t_switch_ = 0.0;
    double speed1_ = 10.0;
    double direction1_ = 0.0;
    double speed_rate_ = 0.0;
    double direction_rate_ = 0.0;
    double amplitude_ = 0.0;
    int n_modes_ = 0;
    double freq_lo_ = 0.0, freq_hi_ = 0.0;
    std::uint64_t seed_ = 0;

    struct Mode {
        double amp, freq, phase;
    };
    std::vector<Mode> modes_;
    void build_modes();
};

}  // namespace twt::sim

#include "twt/wind.hpp"

#include <cmath>
#include <random>

namespace twt::sim {

WindProfile WindProfile::constant(double speed, double direction) {
    WindProfile w;
    w.kind_ = Kind::Constant;
    w.speed0_ = speed;
    w.direction0_ = direction;
    return w;
}

WindProfile WindProfile::step(double speed0, double direction0, double t_switch, double speed1,
                              double direction1) {
    WindProfile w;
    w.kind_ = Kind::Step;
    w.speed0_ = speed0;
    w.direction0_ = direction0;
    w.t_switch_ = t_switch;
    w.speed1_ = speed1;
    w.direction1_ = direction1;
    return w;
}

WindProfile WindProfile::ramp(double speed0, double speed_rate, double direction0,
                              double direction_rate) {
    WindProfile w;
    w.kind_ = Kind::Ramp;
    w.speed0_ = speed0;
    w.speed_rate_ = speed_rate;
    w.direction0_ = direction0;
    w.direction_rate_ = direction_rate;
    return w;
}

WindProfile WindProfile::turbulence(double mean_speed, double direction, double amplitude,
                                    int n_modes, double freq_lo, double freq_hi,
                                    std::uint64_t seed) {
    WindProfile w;
    w.kind_ = Kind::Turbulence;
    w.speed0_ = mean_speed;
    w.direction0_ = direction;
    w.amplitude_ = amplitude;
    w.n_modes_ = n_modes;
    w.freq_lo_ = freq_lo;
    w.freq_hi_ = freq_hi;
    w.seed_ = seed;
    w.build_modes();
    return w;
}

void WindProfile::reseed(std::uint64_t seed) {
    seed_ = seed;
    if (kind_ == Kind::Turbulence) build_modes();
}

void WindProfile::build_modes() {
    modes_.clear();
    std::mt19937_64 rng(seed_);
    std::uniform_real_distribution<double> freq(freq_lo_, freq_hi_);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * 3.14159265358979323846);
    const double per_mode = n_modes_ > 0 ? amplitude_ / std::sqrt(static_cast<double>(n_modes_)) : 0.0;
    for (int k = 0; k < n_modes_; ++k) modes_.push_back({per_mode, freq(rng), phase(rng)});
}

aero::WindSample WindProfile::sample(double t) const {
    aero::WindSample s;
    switch (kind_) {
        case Kind::Constant:
            s.speed = speed0_;
            s.direction = direction0_;
            break;
        case Kind::Step:
            if (t < t_switch_) {
                s.speed = speed0_;
                s.direction = direction0_;
            } else {
                s.speed = speed1_;
                s.direction = direction1_;
            }
            break;
        case Kind::Ramp:
            s.speed = speed0_ + speed_rate_ * t;
            s.direction = direction0_ + direction_rate_ * t;
            s.speed_rate = speed_rate_;
            s.direction_rate = direction_rate_;
            break;
        case Kind::Turbulence: {
            s.speed = speed0_;
            s.direction = direction0_;
            for (const Mode& m : modes_) {
                s.speed += m.amp * std::sin(m.freq * t + m.phase);
                s.speed_rate += m.amp * m.freq * std::cos(m.freq * t + m.phase);
            }
            break;
        }
    }
    return s;
}

}  // namespace twt::sim

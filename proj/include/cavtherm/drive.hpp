#pragma once

#include <complex>

#include "cavtherm/errors.hpp"
#include "cavtherm/grid.hpp"

namespace cavtherm {

// External driving field f(t) = amplitude * exp(-i*drive_freq*t + i*phase),
// active on [t_on, t_off]. Amplitude is in internal units (rad/ns, i.e. f/hbar).
struct DriveProtocol {
    enum class Kind { Off, Tone };

    Kind kind = Kind::Off;
    double amplitude = 0.0;   // rad/ns
    double drive_freq = 0.0;  // rad/ns
    double t_on = 0.0;        // ns
    double t_off = 0.0;       // ns
    double phase = 0.0;       // rad

    bool active(double t) const {
        return kind == Kind::Tone && t >= t_on && t <= t_off;
    }

    // rotating-frame envelope f(t)*exp(+i*frame_freq*t), zero outside support
    Complex envelope_rot(double t, double frame_freq) const {
        if (!active(t))
            return {0.0, 0.0};
        const double ph = (frame_freq - drive_freq) * t + phase;
        return amplitude * Complex{std::cos(ph), std::sin(ph)};
    }

    void validate() const {
        if (kind == Kind::Off)
            return;
        if (amplitude < 0.0)
            throw ValidationError("DriveProtocol: amplitude must be non-negative");
        if (!(t_on < t_off))
            throw ValidationError("DriveProtocol: t_on must precede t_off");
    }
};

} // namespace cavtherm

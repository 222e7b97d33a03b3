#pragma once

#include <stdexcept>
#include <string>

namespace resact {

/// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parameter or input violates its documented invariant.
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// Too few samples (or too short a span) to compute the requested quantity.
class InsufficientData : public Error {
public:
    using Error::Error;
};

/// The integrated state became non-finite.
class IntegrationFailure : public Error {
public:
    IntegrationFailure(const std::string& what, double time_s)
        : Error(what + " at t = " + std::to_string(time_s) + " s"), time_s_(time_s) {}

    double time_s() const noexcept { return time_s_; }

private:
    double time_s_;
};

/// Temperature feedback of winding resistance exceeds the network dissipation.
class ThermalRunaway : public Error {
public:
    explicit ThermalRunaway(double loop_gain)
        : Error("thermal runaway: self-heating loop gain " + std::to_string(loop_gain) + " >= 1"),
          loop_gain_(loop_gain) {}

    double loop_gain() const noexcept { return loop_gain_; }

private:
    double loop_gain_;
};

/// A trace never entered (and stayed inside) the requested band.
class NotSettled : public Error {
public:
    NotSettled(const std::string& what, double final_distance)
        : Error(what + " (final distance " + std::to_string(final_distance) + ")"),
          final_distance_(final_distance) {}

    double final_distance() const noexcept { return final_distance_; }

private:
    double final_distance_;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace resact

// errors.hpp — Exception types shared by the memkernel modules

#pragma once

#include <stdexcept>
#include <string>

namespace memkernel {

// A density matrix failed the trace/positivity gate.
class InvalidState : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A time-local rate hit a zero of ξ; crossing_time is in physical units (1/γ).
class SingularRate : public std::domain_error {
public:
    SingularRate(const std::string& what, double crossing_time)
        : std::domain_error(what), crossing_time_(crossing_time) {}
    double crossing_time() const noexcept { return crossing_time_; }

private:
    double crossing_time_;
};

// Adaptive integration could not proceed (step underflow or non-finite state).
class IntegrationDivergence : public std::runtime_error {
public:
    IntegrationDivergence(const std::string& what, double last_good_time)
        : std::runtime_error(what), last_good_time_(last_good_time) {}
    double last_good_time() const noexcept { return last_good_time_; }

private:
    double last_good_time_;
};

// Φ(t1) is not invertible, so Φ(t2, t1) does not exist.
class NonInvertibleMap : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// σ is 0/0 for a pair of identical states.
class DegeneratePair : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

} // namespace memkernel

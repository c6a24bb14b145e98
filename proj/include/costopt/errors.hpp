#pragma once

#include <stdexcept>
#include <string>

namespace costopt {

// Bad argument: invalid parameters, mismatched base measures, malformed input.
class input_error : public std::invalid_argument {
public:
    explicit input_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// The observation (vector) has zero density under both hypotheses, so the
// likelihood ratio is 0/0 and no decision is meaningful.
class impossible_observation_error : public std::domain_error {
public:
    explicit impossible_observation_error(const std::string& msg) : std::domain_error(msg) {}
};

// A closed-form statistic reduction was requested for a family pair that has none.
class unsupported_reduction_error : public std::runtime_error {
public:
    explicit unsupported_reduction_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Error rates for this test/pair have no analytic evaluation route.
// Callers are expected to fall back to Monte Carlo estimation explicitly.
class not_analytic_error : public std::runtime_error {
public:
    explicit not_analytic_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace costopt

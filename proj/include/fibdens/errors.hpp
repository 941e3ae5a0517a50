#pragma once

#include <stdexcept>
#include <string>

namespace fibdens {

// A theorem-level invariant failed at runtime. Always either a bug or a
// genuine mathematical discovery; the CLI maps this to exit code 3.
class internal_inconsistency_error : public std::logic_error {
public:
    explicit internal_inconsistency_error(const std::string& what)
        : std::logic_error(what) {}
};

// An enumeration or precision budget was exceeded.
class resource_error : public std::runtime_error {
public:
    explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

// nu_p(F(p - eps)) exceeded the configured cap. Carries the prime so a
// Wall-Sun-Sun candidate is reported, never silently truncated.
class exponent_cap_error : public resource_error {
public:
    exponent_cap_error(unsigned long long p, int cap)
        : resource_error("Wall exponent of p = " + std::to_string(p) +
                         " exceeds cap " + std::to_string(cap)),
          prime(p), cap(cap) {}
    unsigned long long prime;
    int cap;
};

// A result would claim more p-adic digits than the inputs support.
class precision_error : public std::runtime_error {
public:
    explicit precision_error(const std::string& what) : std::runtime_error(what) {}
};

// Hensel precondition |f(y0)| < |f'(y0)|^2 failed.
class no_convergence_error : public std::runtime_error {
public:
    no_convergence_error(const std::string& what, int val_f, int val_fprime)
        : std::runtime_error(what), valuation_f(val_f), valuation_fprime(val_fprime) {}
    int valuation_f;
    int valuation_fprime;
};

} // namespace fibdens

#pragma once

#include <string>
#include <vector>

#include "sirtimes/ode.hpp"

namespace sirtimes {

struct CheckResult {
    std::string name;
    bool passed;
    std::string detail;
};

struct VerifyOptions {
    bool quick = false;  // coarse grids and fewer random points
    IntegratorConfig integrator{};
    unsigned threads = 1;
    // Added to the u field before the PDE characterization check; nonzero
    // values must make that check fail.
    double perturb_u = 0.0;
};

// Runs the invariant and cross-method suite on the two reference parameter
// sets (beta=2, gamma=3, mu=1) and (beta=gamma=3, mu=1).
std::vector<CheckResult> run_verification(const VerifyOptions& opt);

}  // namespace sirtimes

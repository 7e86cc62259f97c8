#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rotlab {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;  // deterministic: measured values, no timings
};

// Runs the full end-to-end verification matrix (13 criteria covering exact
// cycle bounds, pigeonhole and decay-exponent checks, the convergent oracle,
// recursion residuals, density, avoidance, complexity, degrees, covering
// slopes and the predicted-cover chain). Each criterion reports pass/fail
// with its measured values; nothing throws for a mere failure. When progress
// is non-null a one-line summary per criterion is streamed as it completes.
// Total runtime is on the order of ten seconds.
std::vector<CriterionResult> run_acceptance(std::ostream* progress = nullptr);

}  // namespace rotlab

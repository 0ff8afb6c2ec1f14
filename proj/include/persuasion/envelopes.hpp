#pragma once

#include "persuasion/scenario.hpp"

namespace persuasion {

// Bayes-plausible split of a prior into weighted posteriors.
struct PosteriorSplit {
    std::vector<Belief> posteriors;
    RatVec weights;
};

struct CavResult {
    Rational value;
    PosteriorSplit split;
    bool exact = true;  // false for the grid lower bound used when |states| > 2
};

// Concave envelope of the sender's indirect utility at pi (the full-commitment
// persuasion value). Exact for binary states via candidate posteriors at the
// best-response breakpoints, 0, 1 and pi; a barycentric-grid lower bound with
// denominator grid_den otherwise.
CavResult cav_u(const Scenario& s, const Belief& pi, long grid_den = 32);

// Quasi-concave envelope of the indirect utility at pi: the largest level t
// whose superlevel set's convex hull contains pi. Binary states only,
// state-independent-sender use case. Exact.
Rational quasicav_u(const Scenario& s, const Belief& pi);

}  // namespace persuasion

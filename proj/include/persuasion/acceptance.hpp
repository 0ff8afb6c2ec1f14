#pragma once

#include "persuasion/scenario.hpp"

#include <string>
#include <vector>

namespace persuasion {

struct CheckLine {
    std::string name;
    std::string expected;
    std::string got;
    bool pass = false;
    std::string source;  // "exact" | "oracle" | "estimate"
};

struct CriterionResult {
    std::string title;
    std::vector<CheckLine> lines;
    bool pass() const {
        for (const auto& l : lines)
            if (!l.pass) return false;
        return true;
    }
};

// Bundled scenarios (identical to the files shipped under data/).
Scenario bundled_scenario(const std::string& name);  // "example1" | "example2"

// The acceptance checks, one result per criterion.
// which: "example1", "example2" or "all".
std::vector<CriterionResult> run_acceptance(const std::string& which);

// Specific criteria by number (1..9).
std::vector<CriterionResult> run_acceptance_criteria(const std::vector<int>& ids);

// One line per criterion; verbose adds every check line.
void print_results(const std::vector<CriterionResult>& results, bool verbose);

}  // namespace persuasion

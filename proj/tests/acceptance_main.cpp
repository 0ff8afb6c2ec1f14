// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Run with "example1", "example2", no argument (= all), or
// "--criteria 1,2,9" for a specific subset.
#include "persuasion/acceptance.hpp"

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

int main(int argc, char** argv) {
    std::string which = "all";
    std::vector<int> criteria;
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        if (arg == "--criteria" && i + 1 < argc) {
            std::string list = argv[++i];
            std::size_t pos = 0;
            while (pos < list.size()) {
                std::size_t comma = list.find(',', pos);
                if (comma == std::string::npos) comma = list.size();
                criteria.push_back(std::stoi(list.substr(pos, comma - pos)));
                pos = comma + 1;
            }
        } else {
            which = arg;
        }
    }
    try {
        auto results = criteria.empty() ? persuasion::run_acceptance(which)
                                        : persuasion::run_acceptance_criteria(criteria);
        persuasion::print_results(results, /*verbose=*/true);
        int failed = 0;
        for (const auto& r : results)
            if (!r.pass()) ++failed;
        std::printf("%d/%zu criteria passed\n", static_cast<int>(results.size()) - failed,
                    results.size());
        return failed == 0 ? 0 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "acceptance suite error: %s\n", e.what());
        return 2;
    }
}

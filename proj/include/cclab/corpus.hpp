#pragma once

#include <map>
#include <string>
#include <vector>

#include "cclab/model.hpp"

namespace cclab {

struct ExpectedScalar {
    std::string name;   // e.g. "theta", "inf_sigma"
    double value = 0.0;
    std::string origin; // "closed form" or "derived"
};

struct ExpectedFacts {
    std::string inequality;
    Verdict verdict = Verdict::Inconclusive;
    std::vector<ExpectedScalar> scalars;
};

struct Fixture {
    std::string name;
    std::string description;
    std::map<std::string, double> params;
    Problem problem;
    std::vector<ExpectedFacts> expected;
    // Set-level facts (assumption2 margin, valid equations, ...).
    std::vector<ExpectedScalar> set_scalars;
    std::vector<std::string> equations;  // formatted with format_equation

    const ExpectedFacts* expected_for(const std::string& inequality) const;
    const Inequality& inequality(const std::string& name) const;
};

std::vector<std::string> builtin_names();

/// Params: cmir takes "f" (default 0.25) and "M" (default 10); ex4_3 takes "M" (default 5).
Fixture builtin(const std::string& name, const std::map<std::string, double>& params = {});

}  // namespace cclab

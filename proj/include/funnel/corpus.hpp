#pragma once

#include <string>
#include <vector>

#include "funnel/problem.hpp"

namespace funnel {

// Hand-encoded equality-constrained test set with canonical starting points.
// Throws std::out_of_range for unknown names.
NlpProblem corpus_lookup(const std::string& name);

std::vector<std::string> corpus_names();

// {"name":..., "n":..., "m":..., "x0":[...]} for harness manifests.
std::string problem_descriptor_json(const NlpProblem& p);

}  // namespace funnel

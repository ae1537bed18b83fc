#pragma once

#include <string>
#include <vector>

#include "arn/dsl/ast.hpp"

namespace arn::dsl {

// Built-in neuron corpus, embedded at build time from corpus/*.arn.
const std::vector<std::string>& zoo_names();

bool zoo_has(const std::string& name);

// Source text of a zoo program; throws std::out_of_range for unknown names.
const std::string& zoo_source(const std::string& name);

NeuronProgram zoo_program(const std::string& name);

}  // namespace arn::dsl

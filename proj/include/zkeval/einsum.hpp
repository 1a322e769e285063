#pragma once

#include <string>
#include <vector>

#include "zkeval/graph.hpp"
#include "zkeval/kernels.hpp"

namespace zkeval {

// Parsed explicit-form einsum equation such as "ij,jk->ik".
struct EinsumSpec {
  std::vector<std::string> operands;
  std::string output;

  static EinsumSpec parse(const std::string& equation);
};

struct EinsumLayout {
  kernels::ContractionPlan plan;
  Shape output_shape;
  int64_t index_space = 1;  // product of all distinct index extents
};

// Throws ShapeError when operand ranks or shared extents disagree and
// UnsupportedOpError for more than two operands.
EinsumLayout einsum_layout(const EinsumSpec& spec, const std::vector<Shape>& operand_shapes);

}  // namespace zkeval

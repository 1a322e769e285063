#include "zkeval/einsum.hpp"

#include <algorithm>
#include <map>

#include "zkeval/errors.hpp"

namespace zkeval {

EinsumSpec EinsumSpec::parse(const std::string& equation) {
  std::string eq;
  for (char c : equation)
    if (c != ' ') eq.push_back(c);
  auto arrow = eq.find("->");
  if (arrow == std::string::npos) throw SchemaError("einsum equation needs an explicit '->': " + equation);
  EinsumSpec spec;
  spec.output = eq.substr(arrow + 2);
  std::string lhs = eq.substr(0, arrow);
  size_t start = 0;
  while (true) {
    auto comma = lhs.find(',', start);
    spec.operands.push_back(lhs.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  auto valid = [](const std::string& s) {
    return std::all_of(s.begin(), s.end(), [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); });
  };
  for (const auto& op : spec.operands)
    if (!valid(op)) throw SchemaError("invalid einsum operand labels in " + equation);
  if (!valid(spec.output)) throw SchemaError("invalid einsum output labels in " + equation);
  for (size_t i = 0; i < spec.output.size(); ++i) {
    if (spec.output.find(spec.output[i], i + 1) != std::string::npos)
      throw SchemaError("repeated output label in " + equation);
    bool found = false;
    for (const auto& op : spec.operands) found = found || op.find(spec.output[i]) != std::string::npos;
    if (!found) throw SchemaError("output label not present in any operand: " + equation);
  }
  return spec;
}

EinsumLayout einsum_layout(const EinsumSpec& spec, const std::vector<Shape>& shapes) {
  if (spec.operands.size() > 2) throw UnsupportedOpError("einsum with more than two operands");
  if (spec.operands.size() != shapes.size()) throw ShapeError("einsum operand count mismatch");

  std::map<char, int64_t> extent;
  for (size_t i = 0; i < shapes.size(); ++i) {
    const auto& labels = spec.operands[i];
    if (labels.size() != shapes[i].size())
      throw ShapeError("einsum operand " + std::to_string(i) + " rank " + std::to_string(shapes[i].size()) +
                       " does not match labels '" + labels + "'");
    for (size_t d = 0; d < labels.size(); ++d) {
      auto [it, inserted] = extent.emplace(labels[d], shapes[i][d]);
      if (!inserted && it->second != shapes[i][d])
        throw ShapeError(std::string("einsum label '") + labels[d] + "' has inconsistent extents");
    }
  }

  std::string summed;
  for (auto& [label, n] : extent)
    if (spec.output.find(label) == std::string::npos) summed.push_back(label);

  // Per-operand stride of each label (repeated labels accumulate strides).
  auto strides_for = [&](size_t i) {
    std::map<char, int64_t> st;
    int64_t s = 1;
    for (size_t d = shapes[i].size(); d-- > 0;) {
      st[spec.operands[i][d]] += s;
      s *= shapes[i][d];
    }
    return st;
  };

  EinsumLayout layout;
  for (char c : spec.output) layout.output_shape.push_back(extent[c]);
  for (auto& [label, n] : extent) layout.index_space *= n;

  auto offsets = [&](const std::string& labels, const std::map<char, int64_t>& st) {
    int64_t count = 1;
    for (char c : labels) count *= extent[c];
    std::vector<int64_t> off(static_cast<size_t>(count), 0);
    std::vector<int64_t> idx(labels.size(), 0);
    for (int64_t n = 0; n < count; ++n) {
      int64_t o = 0;
      for (size_t d = 0; d < labels.size(); ++d) {
        auto it = st.find(labels[d]);
        if (it != st.end()) o += idx[d] * it->second;
      }
      off[static_cast<size_t>(n)] = o;
      for (size_t d = labels.size(); d-- > 0;) {
        if (++idx[d] < extent[labels[d]]) break;
        idx[d] = 0;
      }
    }
    return off;
  };

  auto sa = strides_for(0);
  layout.plan.a_out = offsets(spec.output, sa);
  layout.plan.a_sum = offsets(summed, sa);
  if (shapes.size() == 2) {
    auto sb = strides_for(1);
    layout.plan.b_out = offsets(spec.output, sb);
    layout.plan.b_sum = offsets(summed, sb);
  }
  return layout;
}

}  // namespace zkeval

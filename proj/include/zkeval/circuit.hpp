#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "zkeval/bytes.hpp"
#include "zkeval/field.hpp"
#include "zkeval/graph.hpp"
#include "zkeval/hash.hpp"
#include "zkeval/quantized.hpp"

namespace zkeval {

struct CalibrationReport;

// A wire reference inside a gate: a trace cell, a public-instance slot, a
// private weight, or an inline circuit constant.
struct Operand {
  enum class Kind : uint8_t { kNone = 0, kAdvice = 1, kInstance = 2, kWeight = 3, kConst = 4 };
  Kind kind = Kind::kNone;
  uint64_t index = 0;  // cell/slot index, or the constant's field value

  static Operand advice(uint64_t i) { return {Kind::kAdvice, i}; }
  static Operand instance(uint64_t i) { return {Kind::kInstance, i}; }
  static Operand weight(uint64_t i) { return {Kind::kWeight, i}; }
  static Operand constant(Fe v) { return {Kind::kConst, v.value()}; }

  bool is_advice() const { return kind == Kind::kAdvice; }
  friend bool operator==(const Operand&, const Operand&) = default;
};

enum class GateKind : uint8_t { kEmpty = 0, kArith = 1, kLookup = 2 };

// One constraint row. Arithmetic rows enforce
//   q_l*a + q_r*b + q_m*a*b + q_d*d + q_o*c + q_c = 0;
// lookup rows enforce (a, c) in table `table`.
struct Gate {
  GateKind kind = GateKind::kEmpty;
  Fe q_l, q_r, q_m, q_d, q_o, q_c;
  Operand a, b, c, d;
  uint32_t table = 0;

  void serialize(ByteWriter& w) const;
  static Gate deserialize(ByteReader& r);
  Bytes bytes() const;
  std::vector<Operand> operands() const;
};

enum class ArgumentKind : uint8_t {
  kCumulativeSum,
  kCumulativeProduct,
  kCumulativeDotProduct,
  kElementwiseAdd,
  kElementwiseSub,
  kElementwiseMul,
  kLookup,
  kBooleanity,
  kMax,
  kMin,
  kAffine,
};

const char* argument_name(ArgumentKind k);

// A contiguous block of rows produced by one argument instance.
struct Argument {
  ArgumentKind kind;
  uint64_t row_begin = 0, row_end = 0;
  uint32_t table = 0;
  std::string label;  // originating node id, for diagnostics
};

// Table over a contiguous signed input domain [lo, hi].
struct LookupTable {
  uint32_t id = 0;
  LookupFn fn = LookupFn::kReLU;
  int param = 0;
  int64_t lo = 0, hi = -1;

  uint64_t size() const { return hi < lo ? 0 : static_cast<uint64_t>(hi - lo) + 1; }
  bool contains(int64_t x) const { return x >= lo && x <= hi; }
  int64_t eval(int64_t x) const { return lookup_eval(fn, param, x); }
  std::string name() const;
};

// Witness-generation instruction that is not itself a constraint. Runs just
// before row `at_row` is solved.
struct Hint {
  enum class Kind : uint8_t { kMax = 0, kMin = 1, kExternal = 2 };
  Kind kind = Kind::kExternal;
  std::vector<Operand> inputs;
  uint64_t out = 0;   // advice cell
  uint64_t slot = 0;  // external input slot
  uint64_t at_row = 0;
};

struct WeightSlot {
  std::string name;
  uint64_t offset = 0;
  Shape shape;
  int scale = 0;
};

struct IoSpec {
  std::string name;
  Shape shape;
};

// Instance layout: [public inputs | exposed outputs | H(W) limbs].
class ConstraintSystem {
 public:
  static constexpr uint64_t kDigestLimbs = 8;

  uint64_t n_advice = 0;
  uint64_t n_instance = 0;
  uint64_t n_public_inputs = 0;
  bool binds_weights = false;
  uint64_t n_weights = 0;
  uint64_t n_external = 0;
  int scale = 0;
  std::vector<Gate> gates;
  std::vector<Argument> arguments;
  std::vector<LookupTable> tables;
  std::vector<Hint> hints;  // sorted by at_row
  std::vector<Operand> outputs;
  std::vector<IoSpec> input_specs, output_specs;
  std::vector<bool> output_argmax;
  std::vector<WeightSlot> weight_slots;
  std::string settings_json;  // embedded calibration settings

  uint64_t n_con() const { return gates.size(); }
  uint64_t padded_rows() const;

  Bytes serialize() const;
  static ConstraintSystem deserialize(std::span<const uint8_t> bytes);
  Digest digest() const;

  const Argument* argument_at(uint64_t row) const;
  std::string row_label(uint64_t row) const;

  uint64_t output_slot(size_t k) const { return n_public_inputs + k; }
  uint64_t weight_hash_slot() const { return n_public_inputs + outputs.size(); }
};

// 8 little-endian u32 limbs, the in-instance form of a digest.
std::vector<Fe> digest_limbs(const Digest& d);

// 2^ceil(log2 n), with 1 for n <= 1.
uint64_t padded_rows_for(uint64_t n_con);

// Full column assignment for one execution.
struct Assignment {
  std::vector<Fe> instance;
  std::vector<Fe> advice;
  std::vector<Fe> weights;

  Fe value(const Operand& op) const;
};

// Incrementally builds a constraint system out of the argument families.
class CircuitBuilder {
 public:
  CircuitBuilder() = default;

  Operand new_advice();
  Operand new_instance();
  // Finalizes the instance layout: output slots, then H(W) limbs if `bind`.
  void expose_outputs(std::vector<Operand> outputs, bool bind_weights);
  Operand external_input();  // private value supplied at witness time
  void set_weight_count(uint64_t n) { cs_.n_weights = n; }

  // Registers (or widens) the table for (fn, param) to cover [lo, hi].
  uint32_t table(LookupFn fn, int param, int64_t lo, int64_t hi);

  // m_i = x_i + m_{i-1}, starting at m0 (default 0). Returns m_1..m_N.
  std::vector<Operand> cumulative_sum(std::span<const Operand> x, std::optional<Operand> m0 = {});
  // m_i = x_i * m_{i-1}, starting at m0 (default 1).
  std::vector<Operand> cumulative_product(std::span<const Operand> x, std::optional<Operand> m0 = {});
  // m_i = x_i * y_i + m_{i-1}, starting at m0 (default 0).
  std::vector<Operand> cumulative_dot_product(std::span<const Operand> x, std::span<const Operand> y,
                                              std::optional<Operand> m0 = {});
  enum class ElementwiseOp { kAdd, kSub, kMul };
  std::vector<Operand> elementwise(std::span<const Operand> x, std::span<const Operand> y, ElementwiseOp op);
  std::vector<Operand> lookup(std::span<const Operand> x, uint32_t table_id);
  Operand lookup_one(Operand x, uint32_t table_id);
  // Check-only row (x, expected) in table.
  void lookup_check(Operand x, Operand expected, uint32_t table_id);
  void booleanity(std::span<const Operand> y);
  // c = coeff_a * a + coeff_b * b + constant.
  Operand affine(Operand a, Fe coeff_a, Operand b, Fe coeff_b, Fe constant, ArgumentKind kind = ArgumentKind::kAffine);

  // The composed max/min argument for a claimed value m. `bound` is the
  // largest |x_i| (raw units) the table must accommodate.
  void max_argument(std::span<const Operand> x, Operand m, int64_t bound);
  void min_argument(std::span<const Operand> x, Operand m, int64_t bound);
  // Claimed value from a witness hint, constrained by the argument above.
  Operand max_of(std::span<const Operand> x, int64_t bound);
  Operand min_of(std::span<const Operand> x, int64_t bound);

  void set_label(std::string label) { label_ = std::move(label); }
  ConstraintSystem& cs() { return cs_; }
  ConstraintSystem finish() { return std::move(cs_); }

 private:
  uint64_t push_gate(const Gate& g);
  void begin_argument(ArgumentKind kind, uint32_t table = 0);
  void end_argument();
  void extremum_argument(std::span<const Operand> x, Operand m, int64_t bound, bool is_max);

  ConstraintSystem cs_;
  std::map<std::pair<int, int>, uint32_t> table_ids_;
  std::string label_;
  std::optional<Argument> open_;
  int depth_ = 0;
};

// Solves every row in order: fills advice cells from instance values, weights
// and external inputs, then writes the exposed outputs into their instance
// slots. Throws DomainError when a lookup input falls outside its table
// (naming the originating node).
Assignment execute(const ConstraintSystem& cs, std::vector<Fe> instance, std::vector<Fe> weights,
                   std::span<const Fe> external = {});

struct SatisfactionReport {
  bool ok = true;
  uint64_t row = 0;
  std::vector<Operand> cells;  // operands of the first violated row
  std::string message;
};

SatisfactionReport check_satisfied(const ConstraintSystem& cs, const Assignment& assignment);
bool check_gate(const Gate& g, const ConstraintSystem& cs, Fe a, Fe b, Fe c, Fe d, std::string* why = nullptr);

inline constexpr uint64_t kMaxTableSize = uint64_t{1} << 22;

// Lowers a calibrated graph (einsum lowering applied internally).
ConstraintSystem lower_graph(const Graph& g, const CalibrationReport& cal);

}  // namespace zkeval

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "relfix/ast.hpp"
#include "relfix/instance.hpp"
#include "relfix/tuple_set.hpp"

namespace relfix {

/// Kleene truth value; ordered so that `and` is min and `or` is max.
enum class Truth : std::uint8_t { False = 0, Unknown = 1, True = 2 };

inline Truth operator!(Truth t) { return static_cast<Truth>(2 - static_cast<int>(t)); }
inline Truth operator&&(Truth a, Truth b) { return a < b ? a : b; }
inline Truth operator||(Truth a, Truth b) { return a < b ? b : a; }
inline Truth truth(bool b) { return b ? Truth::True : Truth::False; }

/// A relation known to lie between `lo` and `hi`. When `exact`, `hi` is unused.
struct BVal {
  TupleSet lo;
  TupleSet hi;
  bool exact = true;

  static BVal of(TupleSet t) { return BVal{std::move(t), {}, true}; }
  static BVal between(TupleSet lo, TupleSet hi);
  const TupleSet& upper() const noexcept { return exact ? lo : hi; }
};

/// Raised while evaluating a witness whose context is not a tuple of single atoms.
struct WitnessAbort {};

/// Formulas and expressions of one spec compiled against one universe, with
/// names resolved to variable slots or relation ids.
class Program {
 public:
  struct CNode {
    Op op = Op::None;
    bool is_var = false;        // Ref: variable slot vs relation id
    std::int32_t index = -1;    // Ref: slot or relation; PredCall: pred code
    std::int64_t value = 0;     // IntLit value; Witness arity
    std::vector<std::int32_t> kids;
    std::vector<std::int32_t> slots;  // binder slots; Witness context slots
  };
  struct Code {
    std::int32_t root = -1;
    std::int32_t nslots = 0;
  };

  Program(const Spec& s, std::shared_ptr<const Universe> u);

  /// Compiles `n` with `free` names bound to the first slots; returns a code id.
  int compile(const NodePtr& n, const std::vector<std::string>& free = {});

  const CNode& node(std::int32_t i) const { return nodes_[i]; }
  const Code& code(int id) const { return codes_[id]; }
  const Universe& universe() const { return *u_; }
  const std::shared_ptr<const Universe>& universe_ptr() const { return u_; }

 private:
  const Spec& spec_;
  std::shared_ptr<const Universe> u_;
  std::vector<CNode> nodes_;
  std::vector<Code> codes_;
  std::map<std::string, int> pred_code_;

  struct Scope {
    std::vector<std::pair<std::string, std::int32_t>> names;
    std::int32_t next = 0;
    std::int32_t max = 0;
  };
  std::int32_t emit(const Node& n, Scope& sc);
  int pred_code(const std::string& name);
};

/// Evaluates compiled code over relations given as bounds. With exact
/// relations the result is never Unknown.
class Evaluator {
 public:
  /// `witness` is the value of the variabilized location; `ctx_domains` the
  /// atoms each of its context columns may take.
  Evaluator(const Program& p, const std::vector<BVal>& rels, const BVal* witness = nullptr,
            std::vector<std::uint64_t> ctx_domains = {});

  Truth formula(int code, const std::vector<BVal>& free = {});
  BVal expr(int code, const std::vector<BVal>& free = {});

 private:
  const Program& p_;
  const Universe& u_;
  const std::vector<BVal>& rels_;
  const BVal* witness_;
  std::vector<std::uint64_t> ctx_domains_;
  BVal univ_;
  struct KeyHash {
    std::size_t operator()(const std::vector<std::uint64_t>& k) const noexcept;
  };
  std::unordered_map<std::vector<std::uint64_t>, Truth, KeyHash> memo_;

  using Frame = std::vector<BVal>;
  Truth f(std::int32_t i, Frame& fr);
  BVal e(std::int32_t i, Frame& fr);
  Truth call(const Program::CNode& n, Frame& fr);
  Truth quant(const Program::CNode& n, Frame& fr);
  BVal compr(const Program::CNode& n, Frame& fr);
  Truth witness_formula(const Program::CNode& n, Frame& fr);
  BVal witness_expr(const Program::CNode& n, Frame& fr);
  std::vector<std::uint32_t> witness_prefix(const Program::CNode& n, Frame& fr);
  bool int_value(const BVal& v, std::int64_t& out) const;
  BVal int_set(std::int64_t v) const;
};

/// Concrete relations of an instance as exact bounds.
std::vector<BVal> exact_rels(const Instance& inst);

/// Denotation of expression `e` in `inst`; `env` binds free variables.
TupleSet eval_expr(const Spec& s, const NodePtr& e, const Instance& inst,
                   const std::map<std::string, TupleSet>& env = {});
/// Truth of formula `f` in `inst`. Pred calls inline their bodies.
bool eval_formula(const Spec& s, const NodePtr& f, const Instance& inst,
                  const std::map<std::string, TupleSet>& env = {});

}  // namespace relfix

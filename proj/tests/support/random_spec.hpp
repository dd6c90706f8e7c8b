#pragma once
// Random specification text for property tests. Expressions are generated at a
// requested arity so every output parses and resolves; types may still be
// disjoint, which the solver and evaluator must handle anyway.

#include <algorithm>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace relfix::testing {

struct RandomSpecOptions {
  int max_sigs = 3;
  int max_fields = 3;
  int scope = 2;        // default scope of the generated command
  int bitwidth = 4;
  int depth = 3;        // expression/formula nesting
  bool ints = true;     // allow #e comparisons
  bool rich = false;    // comprehensions, pred params and calls, asserts
  int max_bits = 14;    // bound on sig pool bits plus field bits at the scope
};

class RandomSpecGen {
 public:
  explicit RandomSpecGen(std::uint64_t seed, RandomSpecOptions opt = {}) : rng_(seed), opt_(opt) {}

  struct Field {
    std::string name, owner, range, mult;
  };

  /// A spec with a pred `T` (no params) and `run T for <scope>`.
  std::string spec() {
    sigs_.clear();
    fields_.clear();
    one_sigs_.clear();
    const int nsig = pick(1, opt_.max_sigs);
    for (int i = 0; i < nsig; ++i) sigs_.push_back("S" + std::to_string(i));
    int bits = nsig * opt_.scope;
    const int nfield = pick(0, opt_.max_fields);
    for (int i = 0; i < nfield; ++i) {
      Field f{"f" + std::to_string(i), sigs_[pick(0, nsig - 1)], sigs_[pick(0, nsig - 1)], ""};
      int cost = opt_.scope * opt_.scope;
      if (bits + cost > opt_.max_bits) break;
      bits += cost;
      static const char* mults[] = {"set", "lone", "one"};
      f.mult = mults[pick(0, 2)];
      fields_.push_back(f);
    }
    if (nsig > 1 && coin(0.25)) one_sigs_.push_back(sigs_.back());

    std::ostringstream os;
    for (const auto& sg : sigs_) {
      bool one = std::find(one_sigs_.begin(), one_sigs_.end(), sg) != one_sigs_.end();
      os << (one ? "one sig " : "sig ") << sg << " {";
      bool first = true;
      for (const auto& f : fields_) {
        if (f.owner != sg) continue;
        os << (first ? "\n  " : ",\n  ") << f.name << ": " << f.mult << ' ' << f.range;
        first = false;
      }
      os << (first ? "}\n" : "\n}\n");
    }
    vars_.clear();
    if (coin(0.6)) os << "fact {\n  " << formula(opt_.depth) << "\n}\n";
    if (opt_.rich) {
      vars_ = {"p"};
      const std::string ps = sigs_[pick(0, static_cast<int>(sigs_.size()) - 1)];
      os << "pred Q[p: " << ps << "] {\n  " << formula(opt_.depth - 1) << "\n}\n";
      vars_.clear();
      os << "pred T {\n  " << formula(opt_.depth) << "\n  some x: " << ps << " | Q[x]\n}\n";
      os << "assert A {\n  " << formula(opt_.depth) << "\n}\n";
      os << "run T for " << opt_.scope << " but " << opt_.bitwidth << " Int\n";
      os << "check A for " << opt_.scope << " but " << opt_.bitwidth << " Int\n";
    } else {
      os << "pred T {\n  " << formula(opt_.depth) << "\n}\n";
      os << "run T for " << opt_.scope << " but " << opt_.bitwidth << " Int\n";
    }
    return os.str();
  }

  const std::vector<std::string>& sigs() const { return sigs_; }
  /// Formula text in which `var` is a bound unary variable.
  std::string formula_over(const std::string& var, int depth) {
    vars_.push_back(var);
    std::string f = formula(depth);
    vars_.pop_back();
    return f;
  }
  const std::vector<Field>& fields() const { return fields_; }

  /// Expression text of the given arity over the current sigs and fields.
  std::string expr(int arity, int depth) {
    if (arity == 1) {
      if (depth <= 0 || coin(0.3)) {
        if (!vars_.empty() && coin(0.5)) return vars_[pick(0, static_cast<int>(vars_.size()) - 1)];
        if (coin(0.08)) return "univ";
        if (coin(0.05)) return "none";
        return sigs_[pick(0, static_cast<int>(sigs_.size()) - 1)];
      }
      switch (pick(0, 4)) {
        case 0: return "(" + expr(1, depth - 1) + setop() + expr(1, depth - 1) + ")";
        case 1:
        case 2: return "(" + expr(1, depth - 1) + "." + expr(2, depth - 1) + ")";
        case 3: return "(" + expr(2, depth - 1) + "." + expr(1, depth - 1) + ")";
        default:
          if (opt_.rich && coin(0.5)) {
            std::string v = fresh();
            std::string bound = expr(1, 0);
            vars_.push_back(v);
            std::string body = formula(depth - 1);
            vars_.pop_back();
            return "{" + v + ": " + bound + " | " + body + "}";
          }
          return "(" + expr(1, depth - 1) + setop() + expr(1, depth - 1) + ")";
      }
    }
    if (depth <= 0 || coin(0.3)) {
      if (!fields_.empty() && !coin(0.1)) return fields_[pick(0, static_cast<int>(fields_.size()) - 1)].name;
      return coin(0.5) ? "iden" : "(" + expr(1, 0) + "->" + expr(1, 0) + ")";
    }
    switch (pick(0, 5)) {
      case 0: return "(" + expr(2, depth - 1) + setop() + expr(2, depth - 1) + ")";
      case 1: return "~" + atom2(depth - 1);
      case 2: return "^" + atom2(depth - 1);
      case 3: return "*" + atom2(depth - 1);
      case 4: return "(" + expr(1, depth - 1) + "->" + expr(1, depth - 1) + ")";
      default: return "(" + expr(2, depth - 1) + "." + expr(2, depth - 1) + ")";
    }
  }

  std::string formula(int depth) {
    if (depth <= 0 || coin(0.25)) return leaf(depth);
    switch (pick(0, 6)) {
      case 0: return "(" + formula(depth - 1) + " && " + formula(depth - 1) + ")";
      case 1: return "(" + formula(depth - 1) + " || " + formula(depth - 1) + ")";
      case 2: return "(" + formula(depth - 1) + " => " + formula(depth - 1) + ")";
      case 3: return "(" + formula(depth - 1) + " <=> " + formula(depth - 1) + ")";
      case 4: return "!" + paren_formula(depth - 1);
      default: {
        static const char* qs[] = {"all", "some", "no", "lone", "one"};
        std::string v = fresh();
        std::string bound = expr(1, 1);
        vars_.push_back(v);
        std::string body = formula(depth - 1);
        vars_.pop_back();
        return "(" + std::string(qs[pick(0, 4)]) + " " + v + ": " + bound + " | " + body + ")";
      }
    }
  }

 private:
  std::mt19937_64 rng_;
  RandomSpecOptions opt_;
  std::vector<std::string> sigs_, one_sigs_, vars_;
  std::vector<Field> fields_;
  int fresh_ = 0;

  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin(double p) { return std::bernoulli_distribution(p)(rng_); }
  std::string fresh() { return "v" + std::to_string(fresh_++); }
  std::string setop() {
    static const char* ops[] = {" + ", " - ", " & "};
    return ops[pick(0, 2)];
  }
  std::string atom2(int depth) {
    std::string e = expr(2, depth);
    return e.front() == '(' || e.find_first_of(" .+-&>") == std::string::npos ? e : "(" + e + ")";
  }
  std::string paren_formula(int depth) {
    std::string f = formula(depth);
    return f.front() == '(' ? f : "(" + f + ")";
  }
  std::string leaf(int depth) {
    const int ar = coin(0.7) ? 1 : 2;
    switch (pick(0, opt_.ints ? 3 : 2)) {
      case 0: {
        static const char* cmp[] = {" in ", " !in ", " = ", " != "};
        return "(" + expr(ar, depth) + cmp[pick(0, 3)] + expr(ar, depth) + ")";
      }
      case 1: {
        static const char* ms[] = {"no ", "some ", "lone ", "one "};
        return "(" + std::string(ms[pick(0, 3)]) + expr(ar, depth) + ")";
      }
      case 2: return coin(0.5) ? "(" + expr(1, depth) + " in " + expr(1, depth) + ")" : "{}";
      default: {
        static const char* ic[] = {" < ", " <= ", " > ", " >= ", " = ", " != "};
        return "(#" + expr(1, depth) + ic[pick(0, 5)] + std::to_string(pick(0, 3)) + ")";
      }
    }
  }
};

}  // namespace relfix::testing

#include "relfix/printer.hpp"

#include <set>
#include <sstream>

namespace relfix {

namespace {

// Binding strength; larger binds tighter. Mirrors the parser's levels.
int prec(const Node& n) {
  switch (n.op) {
    case Op::Or: return 1;
    case Op::Iff: return 2;
    case Op::Implies: return 3;
    case Op::And: return 4;
    case Op::Not:
    case Op::QAll:
    case Op::QSome:
    case Op::QOne:
    case Op::QLone:
    case Op::QNo: return 5;
    case Op::In:
    case Op::NotIn:
    case Op::Eq:
    case Op::Neq:
    case Op::Lt:
    case Op::Le:
    case Op::Gt:
    case Op::Ge: return 6;
    case Op::MNo:
    case Op::MOne:
    case Op::MLone:
    case Op::MSome: return 7;
    case Op::Union:
    case Op::Diff: return 8;
    case Op::Card: return 9;
    case Op::Inter: return 10;
    case Op::Product: return 11;
    case Op::Join: return 12;
    case Op::Transpose:
    case Op::Closure:
    case Op::RClosure: return 13;
    default: return 14;
  }
}

class Printer {
 public:
  explicit Printer(const std::set<std::vector<std::uint32_t>>* marks = nullptr) : marks_(marks) {}

  std::string str() const { return os_.str(); }

  void top_block(const Node& block, int indent) {
    if (block.op != Op::Block) {
      os_ << "{\n" << pad(indent + 1);
      steps_.push_back(0);
      node(block, indent + 1, false);
      steps_.pop_back();
      os_ << "\n" << pad(indent) << "}";
      return;
    }
    // A marked body keeps its braces; the marker goes on the line before.
    if (marked()) os_ << "//@loc\n";
    if (block.kids.empty()) {
      os_ << "{}";
      return;
    }
    os_ << "{\n";
    for (std::uint32_t i = 0; i < block.kids.size(); ++i) {
      steps_.push_back(i);
      os_ << pad(indent + 1);
      node(*block.kids[i], indent + 1, false);
      os_ << "\n";
      steps_.pop_back();
    }
    os_ << pad(indent) << "}";
  }

  void node(const Node& n, int indent, bool parens) {
    if (marked()) {
      os_ << "//@loc\n" << pad(indent + 1) << "(";
      bare(n, indent);
      os_ << ")";
      return;
    }
    if (parens) os_ << "(";
    bare(n, indent);
    if (parens) os_ << ")";
  }

 private:
  std::ostringstream os_;
  const std::set<std::vector<std::uint32_t>>* marks_;
  std::vector<std::uint32_t> steps_;

  static std::string pad(int indent) { return std::string(2 * indent, ' '); }

  bool marked() const { return marks_ && marks_->count(steps_) > 0; }

  void child(const Node& parent, std::uint32_t i, int min_prec, int indent) {
    const Node& k = *parent.kids[i];
    bool p = prec(k) < min_prec || (k.is_quantifier() && !open_ended_ok(parent, i)) ||
             (parent.is_logic_binary() && k.is_logic_binary() && k.op != parent.op);
    steps_.push_back(i);
    node(k, indent, p);
    steps_.pop_back();
  }

  // A quantifier runs to the end of its enclosing scope, so it only goes
  // unparenthesized where nothing follows it.
  static bool open_ended_ok(const Node& parent, std::uint32_t i) {
    return parent.op == Op::Block || (parent.is_quantifier() && i + 1 == parent.kids.size());
  }

  void binders(const Node& n, int indent) {
    for (std::uint32_t i = 0; i < n.vars.size(); ++i) {
      if (i) os_ << ", ";
      os_ << n.vars[i] << ": ";
      child(n, i, 8, indent);
    }
    os_ << " | ";
  }

  void bare(const Node& n, int indent) {
    switch (n.op) {
      case Op::Ref: os_ << n.name; return;
      case Op::IntLit:
        if (n.value < 0) os_ << "(" << n.value << ")";
        else os_ << n.value;
        return;
      case Op::Iden:
      case Op::Univ:
      case Op::None:
      case Op::IntUniv: os_ << op_symbol(n.op); return;
      case Op::Union:
      case Op::Diff:
      case Op::Inter:
      case Op::Product: {
        int p = prec(n);
        child(n, 0, p, indent);
        os_ << " " << op_symbol(n.op) << " ";
        child(n, 1, p + 1, indent);
        return;
      }
      case Op::Join:
        child(n, 0, 12, indent);
        os_ << ".";
        child(n, 1, 13, indent);
        return;
      case Op::Transpose:
      case Op::Closure:
      case Op::RClosure:
        os_ << op_symbol(n.op);
        child(n, 0, 13, indent);
        return;
      case Op::Card:
        os_ << "#";
        child(n, 0, 9, indent);
        return;
      case Op::Compr:
        os_ << "{";
        binders(n, indent);
        child(n, static_cast<std::uint32_t>(n.kids.size() - 1), 1, indent);
        os_ << "}";
        return;
      case Op::Witness:
        os_ << "$witness[";
        for (std::size_t i = 0; i < n.vars.size(); ++i) os_ << (i ? ", " : "") << n.vars[i];
        os_ << "]";
        return;
      case Op::In:
      case Op::NotIn:
      case Op::Eq:
      case Op::Neq:
      case Op::Lt:
      case Op::Le:
      case Op::Gt:
      case Op::Ge:
        child(n, 0, 8, indent);
        os_ << " " << op_symbol(n.op) << " ";
        child(n, 1, 8, indent);
        return;
      case Op::And:
      case Op::Or:
      case Op::Iff: {
        int p = prec(n);
        child(n, 0, p, indent);
        os_ << " " << op_symbol(n.op) << " ";
        child(n, 1, p + 1, indent);
        return;
      }
      case Op::Implies:
        child(n, 0, 4, indent);
        os_ << " => ";
        child(n, 1, 3, indent);
        return;
      case Op::Not:
        os_ << "!";
        child(n, 0, 5, indent);
        return;
      case Op::QAll:
      case Op::QSome:
      case Op::QOne:
      case Op::QLone:
      case Op::QNo:
        os_ << op_symbol(n.op) << " ";
        binders(n, indent);
        child(n, static_cast<std::uint32_t>(n.kids.size() - 1), 1, indent);
        return;
      case Op::MNo:
      case Op::MOne:
      case Op::MLone:
      case Op::MSome:
        os_ << op_symbol(n.op) << " ";
        child(n, 0, 8, indent);
        return;
      case Op::PredCall:
        os_ << n.name << "[";
        for (std::uint32_t i = 0; i < n.kids.size(); ++i) {
          if (i) os_ << ", ";
          child(n, i, 8, indent);
        }
        os_ << "]";
        return;
      case Op::Block:
        if (n.kids.empty()) {
          os_ << "{}";
          return;
        }
        os_ << "{ ";
        for (std::uint32_t i = 0; i < n.kids.size(); ++i) {
          if (i) os_ << " ";
          child(n, i, 1, indent);
        }
        os_ << " }";
        return;
    }
  }
};

const char* mult_kw(FieldMult m) {
  switch (m) {
    case FieldMult::Set: return "set";
    case FieldMult::One: return "one";
    case FieldMult::Lone: return "lone";
  }
  return "set";
}

void print_scope(std::ostream& os, const Scope& sc) {
  os << " for " << sc.default_count;
  bool first = true;
  auto sep = [&] {
    os << (first ? " but " : ", ");
    first = false;
  };
  for (const auto& [name, s] : sc.overrides) {
    sep();
    if (s.exact) os << "exactly ";
    os << s.count << " " << name;
  }
  if (sc.bitwidth != 4) {
    sep();
    os << sc.bitwidth << " Int";
  }
}

}  // namespace

std::string to_string(const Node& n) {
  Printer p;
  p.node(n, 0, false);
  return p.str();
}

std::string pretty_print(const Spec& s) {
  std::ostringstream os;
  auto marks_for = [&](DeclRef d) {
    std::set<std::vector<std::uint32_t>> m;
    for (const auto& p : s.marked)
      if (p.decl == d) m.insert(p.steps);
    return m;
  };
  auto body = [&](DeclRef d) {
    auto marks = marks_for(d);
    Printer p(&marks);
    p.top_block(*s.body(d), 0);
    return p.str();
  };

  for (const auto& sig : s.sigs) {
    if (sig.qual == SigQual::Abstract) os << "abstract ";
    if (sig.qual == SigQual::One) os << "one ";
    os << "sig ";
    for (std::size_t i = 0; i < sig.names.size(); ++i) os << (i ? ", " : "") << sig.names[i];
    if (sig.parent) os << " extends " << *sig.parent;
    if (sig.fields.empty()) {
      os << " {}\n\n";
      continue;
    }
    os << " {\n";
    for (std::size_t i = 0; i < sig.fields.size(); ++i) {
      const auto& f = sig.fields[i];
      os << "  " << f.name << ": " << mult_kw(f.mult) << " " << f.range
         << (i + 1 < sig.fields.size() ? ",\n" : "\n");
    }
    os << "}\n\n";
  }
  for (std::uint32_t i = 0; i < s.facts.size(); ++i) {
    os << "fact " << (s.facts[i].name.empty() ? "" : s.facts[i].name + " ")
       << body({DeclKind::Fact, i}) << "\n\n";
  }
  for (std::uint32_t i = 0; i < s.preds.size(); ++i) {
    const auto& p = s.preds[i];
    os << "pred " << p.name;
    if (!p.params.empty()) {
      os << "[";
      for (std::size_t k = 0; k < p.params.size(); ++k)
        os << (k ? ", " : "") << p.params[k].name << ": " << p.params[k].type;
      os << "]";
    }
    os << " " << body({DeclKind::Pred, i}) << "\n\n";
  }
  for (std::uint32_t i = 0; i < s.asserts.size(); ++i)
    os << "assert " << s.asserts[i].name << " " << body({DeclKind::Assert, i}) << "\n\n";

  bool all_oracles = true;
  for (const auto& c : s.commands) all_oracles &= c.is_oracle;
  for (const auto& c : s.commands) {
    if (!all_oracles && c.is_oracle) os << "//@oracle\n";
    os << (c.kind == CmdKind::Run ? "run " : "check ") << c.target;
    print_scope(os, c.scope);
    if (c.kind == CmdKind::Run) os << " expect " << (c.expect == Expect::Sat ? 1 : 0);
    os << "\n";
  }
  return os.str();
}

}  // namespace relfix

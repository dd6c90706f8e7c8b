#include "relfix/instance.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "relfix/analysis.hpp"
#include "relfix/errors.hpp"

namespace relfix {

int Universe::rel(const std::string& name) const {
  auto it = rel_index.find(name);
  if (it == rel_index.end()) throw EvalError("unknown relation '" + name + "'");
  return it->second;
}

std::int64_t Universe::wrap(std::int64_t v) const {
  const std::int64_t span = std::int64_t{1} << bitwidth;
  std::int64_t r = (v - int_min) % span;
  if (r < 0) r += span;
  return r + int_min;
}

std::uint32_t Universe::int_atom(std::int64_t v) const {
  std::uint32_t first = static_cast<std::uint32_t>(std::countr_zero(int_mask));
  return first + static_cast<std::uint32_t>(wrap(v) - int_min);
}

std::uint64_t Universe::pool_mask(const Pool& p, std::uint32_t count) const {
  if (count == 0) return 0;
  std::uint64_t ones = count >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << count) - 1;
  return ones << p.first;
}

std::shared_ptr<const Universe> Universe::build(const Spec& s, const Scope& scope) {
  if (scope.bitwidth < 1 || scope.bitwidth > 6)
    throw ResourceError("bitwidth " + std::to_string(scope.bitwidth) + " is outside 1..6");
  auto u = std::make_shared<Universe>();
  TypeEnv env(s);

  std::map<std::string, const SigDecl*> decl_of;
  std::map<std::string, std::vector<std::string>> children;
  for (const auto& d : s.sigs)
    for (const auto& n : d.names) {
      decl_of[n] = &d;
      if (d.parent) children[*d.parent].push_back(n);
    }

  std::function<std::uint32_t(const std::string&)> lower = [&](const std::string& x) {
    const SigDecl& d = *decl_of.at(x);
    if (d.qual == SigQual::One) return std::uint32_t{1};
    auto ov = scope.overrides.find(x);
    if (ov != scope.overrides.end() && ov->second.exact) return static_cast<std::uint32_t>(ov->second.count);
    std::uint32_t sum = 0;
    for (const auto& c : children[x]) sum += lower(c);
    return sum;
  };
  std::function<std::uint32_t(const std::string&)> bound = [&](const std::string& x) {
    const SigDecl& d = *decl_of.at(x);
    if (d.qual == SigQual::One) return std::uint32_t{1};
    auto ov = scope.overrides.find(x);
    if (ov != scope.overrides.end()) return static_cast<std::uint32_t>(ov->second.count);
    if (d.parent) return bound(*d.parent);
    return std::max(static_cast<std::uint32_t>(scope.default_count), lower(x));
  };

  for (const auto& [name, sc] : scope.overrides)
    if (!decl_of.count(name)) throw ResolveError("scope names unknown sig '" + name + "'");

  // Pools in declaration order.
  for (const auto& d : s.sigs) {
    for (const auto& n : d.names) {
      Pool p{n, u->size(), 0, 0};
      if (d.qual == SigQual::One) p.size = p.min = 1;
      else if (d.qual != SigQual::Abstract) p.size = bound(n);
      for (std::uint32_t i = 0; i < p.size; ++i) {
        u->atom_names.push_back(n + "$" + std::to_string(i));
        u->atom_value.push_back(0);
        u->atom_family.push_back(static_cast<int>(env.family_of(n)));
      }
      u->pools.push_back(p);
      if (u->size() > TupleSet::kMaxAtoms)
        throw ResourceError("scope needs more than 64 atoms; use a smaller scope");
    }
  }
  u->bitwidth = scope.bitwidth;
  u->int_min = -(std::int64_t{1} << (scope.bitwidth - 1));
  u->int_max = (std::int64_t{1} << (scope.bitwidth - 1)) - 1;
  if (u->size() + (std::size_t{1} << scope.bitwidth) > TupleSet::kMaxAtoms)
    throw ResourceError("scope needs more than 64 atoms; use a smaller scope or bitwidth");
  for (std::int64_t v = u->int_min; v <= u->int_max; ++v) {
    u->int_mask |= std::uint64_t{1} << u->size();
    u->atom_names.push_back(std::to_string(v));
    u->atom_value.push_back(v);
    u->atom_family.push_back(-1);
  }

  for (const auto& d : s.sigs)
    for (const auto& n : d.names) {
      u->rel_index[n] = static_cast<int>(u->rels.size());
      u->rels.push_back(RelInfo{n, RelKind::Sig, 1, -1, -1, FieldMult::Set});
    }
  for (const auto& d : s.sigs) {
    if (!d.fields.empty() && d.names.size() != 1)
      throw ResourceError("fields on a multi-name sig declaration are not supported");
    for (const auto& f : d.fields) {
      u->rel_index[f.name] = static_cast<int>(u->rels.size());
      u->rels.push_back(RelInfo{f.name, RelKind::Field, 2, u->rel_index.at(d.names.front()),
                                f.range == "Int" ? -1 : u->rel_index.at(f.range), f.mult});
    }
  }

  u->sig_pools.resize(u->rels.size());
  std::function<void(int, const std::string&)> collect = [&](int rel, const std::string& x) {
    for (std::size_t i = 0; i < u->pools.size(); ++i)
      if (u->pools[i].sig == x) u->sig_pools[rel].push_back(static_cast<int>(i));
    for (const auto& c : children[x]) collect(rel, c);
  };
  for (const auto& d : s.sigs)
    for (const auto& n : d.names) {
      collect(u->rel_index.at(n), n);
      auto ov = scope.overrides.find(n);
      if (d.qual == SigQual::One) continue;
      if (ov != scope.overrides.end() || !d.parent)
        u->bounds.push_back(SigBound{u->rel_index.at(n), bound(n),
                                     ov != scope.overrides.end() && ov->second.exact});
    }

  double bits = 0;
  auto extent_size = [&](int rel) {
    std::uint32_t c = 0;
    for (int p : u->sig_pools[rel]) c += u->pools[p].size;
    return c;
  };
  for (const auto& p : u->pools) bits += p.size;
  for (const auto& r : u->rels)
    if (r.kind == RelKind::Field)
      bits += double(extent_size(r.owner)) *
              (r.range < 0 ? double(std::size_t{1} << scope.bitwidth) : double(extent_size(r.range)));
  if (bits > 1e7)
    throw ResourceError("scope yields " + std::to_string(static_cast<long long>(bits)) +
                        " candidate bits (limit 10^7); use a smaller scope");
  return u;
}

std::uint64_t Instance::univ() const {
  std::uint64_t m = universe->int_mask;
  for (std::size_t r = 0; r < universe->rels.size(); ++r)
    if (universe->rels[r].kind == RelKind::Sig) m |= rels[r].mask();
  return m;
}

std::string Instance::str() const {
  std::vector<std::size_t> order(universe->rels.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return universe->rels[a].name < universe->rels[b].name; });
  std::ostringstream os;
  for (std::size_t r : order) {
    std::vector<std::string> tuples;
    rels[r].for_each([&](const std::vector<std::uint32_t>& t) {
      std::string s = "(";
      for (std::size_t i = 0; i < t.size(); ++i) s += (i ? "," : "") + universe->atom_names[t[i]];
      tuples.push_back(s + ")");
    });
    std::sort(tuples.begin(), tuples.end());
    os << universe->rels[r].name << " = {";
    for (std::size_t i = 0; i < tuples.size(); ++i) os << (i ? ", " : "") << tuples[i];
    os << "}\n";
  }
  return os.str();
}

}  // namespace relfix

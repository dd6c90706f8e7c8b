#include "relfix/location.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>

#include "relfix/analysis.hpp"
#include "relfix/errors.hpp"
#include "relfix/printer.hpp"

namespace relfix {

namespace {

using Kind = LocationError::Kind;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

int to_int(std::string_view s, std::string_view marker) {
  int v = 0;
  s = trim(s);
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || v < 0)
    throw LocationError(Kind::BadMarker, "bad number '" + std::string(s) + "' in marker '" +
                                             std::string(marker) + "'");
  return v;
}

bool is_oracle_assert(const Spec& s, std::uint32_t index) {
  for (const auto& c : s.commands)
    if (c.is_oracle && c.kind == CmdKind::Check && c.target == s.asserts.at(index).name) return true;
  return false;
}

std::optional<DeclRef> decl_by_name(const Spec& s, std::string_view name) {
  if (auto i = s.pred_index(name)) return DeclRef{DeclKind::Pred, *i};
  if (auto i = s.assert_index(name)) return DeclRef{DeclKind::Assert, *i};
  for (std::uint32_t i = 0; i < s.facts.size(); ++i)
    if (s.decl_name({DeclKind::Fact, i}) == name) return DeclRef{DeclKind::Fact, i};
  return std::nullopt;
}

Location resolve_named(const Spec& s, std::string_view marker) {
  auto slash = marker.find('/');
  std::string_view name = trim(marker.substr(0, slash));
  auto d = decl_by_name(s, name);
  if (!d) {
    if (s.find_sig(name) || s.find_field(name))
      throw LocationError(Kind::Forbidden, "'" + std::string(name) + "' is a declaration, not a formula");
    throw LocationError(Kind::NoMatch, "no predicate, fact or assertion named '" + std::string(name) + "'");
  }
  NodePath path{*d, {}};
  while (slash != std::string_view::npos) {
    auto next = marker.find('/', slash + 1);
    path.steps.push_back(
        static_cast<std::uint32_t>(to_int(marker.substr(slash + 1, next - slash - 1), marker)));
    slash = next;
  }
  return location_of(s, path);
}

Location resolve_span(const Spec& s, std::string_view marker) {
  auto dots = marker.find("..");
  std::string_view left = marker.substr(0, dots), right = marker.substr(dots + 2);
  // left is "[file:]line:col"; the file may itself contain ':'.
  auto c2 = left.rfind(':');
  if (c2 == std::string_view::npos) throw LocationError(Kind::BadMarker, "bad span marker '" + std::string(marker) + "'");
  auto c1 = left.rfind(':', c2 - 1);
  SourceSpan want;
  std::string_view file;
  if (c1 == std::string_view::npos || c2 == 0) {
    want.start_line = to_int(left.substr(0, c2), marker);
  } else {
    file = left.substr(0, c1);
    want.start_line = to_int(left.substr(c1 + 1, c2 - c1 - 1), marker);
  }
  want.start_col = to_int(left.substr(c2 + 1), marker);
  auto c3 = right.find(':');
  if (c3 == std::string_view::npos) throw LocationError(Kind::BadMarker, "bad span marker '" + std::string(marker) + "'");
  want.end_line = to_int(right.substr(0, c3), marker);
  want.end_col = to_int(right.substr(c3 + 1), marker);
  if (want.end_line < want.start_line ||
      (want.end_line == want.start_line && want.end_col < want.start_col))
    throw LocationError(Kind::BadMarker, "span ends before it starts in '" + std::string(marker) + "'");

  if (!file.empty() && s.file) {
    namespace fs = std::filesystem;
    if (fs::path(std::string(file)).filename() != fs::path(*s.file).filename())
      throw LocationError(Kind::NoMatch, "marker refers to '" + std::string(file) + "', not '" + *s.file + "'");
  }

  bool inside_some = false;
  for (DeclRef d : s.formula_decls()) {
    std::optional<NodePath> hit;
    visit(s.body(d), [&](const NodePtr& n, const std::vector<std::uint32_t>& steps) {
      if (hit || !n->span.valid()) return;
      if (n->span.same_range(want)) hit = NodePath{d, steps};
      else if (want.covers(n->span)) inside_some = true;
    });
    if (hit) return location_of(s, *hit);
  }
  for (const auto& sig : s.sigs)
    if (sig.span.covers(want)) throw LocationError(Kind::Forbidden, "span lies in a sig declaration", want);
  for (const auto& c : s.commands)
    if (c.span.covers(want)) throw LocationError(Kind::Forbidden, "span lies in a command", want);
  if (inside_some)
    throw LocationError(Kind::NotUnique, "span covers more than one node; no unique node matches", want);
  throw LocationError(Kind::NoMatch, "no node covers exactly " + std::string(marker), want);
}

}  // namespace

std::string describe(const Spec& s, const Location& loc) {
  std::string out = s.decl_name(loc.path.decl);
  for (auto i : loc.path.steps) out += "/" + std::to_string(i);
  return out;
}

Location location_of(const Spec& s, const NodePath& path) {
  NodePtr n = node_at(s, path);
  if (!n) throw LocationError(Kind::NoMatch, "path does not resolve to a node");
  if (path.decl.kind == DeclKind::Assert && is_oracle_assert(s, path.decl.index))
    throw LocationError(Kind::Forbidden, "assertion '" + s.decl_name(path.decl) + "' is an oracle",
                        n->span);
  return Location{path, n->sort(), n->span};
}

Location resolve_location(const Spec& s, std::string_view marker) {
  marker = trim(marker);
  if (marker.empty()) throw LocationError(Kind::BadMarker, "empty location marker");
  if (marker.find("..") != std::string_view::npos) return resolve_span(s, marker);
  return resolve_named(s, marker);
}

std::vector<Location> marked_locations(const Spec& s) {
  std::vector<Location> out;
  for (const auto& p : s.marked) out.push_back(location_of(s, p));
  return out;
}

std::vector<Location> read_locations(const Spec& s, std::string_view text) {
  std::vector<Location> out;
  while (!text.empty()) {
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    // '#' opens a comment at line start or after whitespace; "fact#0" is a name.
    for (std::size_t i = 0; i < line.size(); ++i)
      if (line[i] == '#' && (i == 0 || std::isspace(static_cast<unsigned char>(line[i - 1])))) {
        line = line.substr(0, i);
        break;
      }
    line = trim(line);
    if (!line.empty()) out.push_back(resolve_location(s, line));
  }
  return out;
}

NodePtr normalize_replacement(const Location& loc, NodePtr replacement) {
  if (loc.path.steps.empty() && replacement->op != Op::Block)
    return make_node(Op::Block, {std::move(replacement)});
  return replacement;
}

Spec apply_patch(const Spec& s, const Patch& patch) {
  for (std::size_t i = 0; i < patch.size(); ++i)
    for (std::size_t j = 0; j < patch.size(); ++j) {
      if (i == j) continue;
      const auto& a = patch[i].first.path;
      const auto& b = patch[j].first.path;
      if (a.decl == b.decl && a.steps.size() <= b.steps.size() &&
          std::equal(a.steps.begin(), a.steps.end(), b.steps.begin()))
        throw TypeError("patched locations overlap: " + describe(s, patch[i].first) + " and " +
                        describe(s, patch[j].first));
    }

  TypeEnv env(s);
  Spec out = s;
  for (const auto& [loc, repl] : patch) {
    NodePtr orig = node_at(s, loc.path);
    if (!orig) throw LocationError(Kind::NoMatch, "location " + describe(s, loc) + " does not resolve");
    if (repl->sort() != orig->sort())
      throw TypeError("replacement '" + to_string(*repl) + "' has the wrong sort for " + describe(s, loc));
    Context ctx = context_at(env, loc.path.decl, loc.path.steps);
    TypeChecker tc(env);
    RelType want = tc.any(*orig, ctx);
    RelType got = tc.any(*repl, ctx);
    if (want.arity() != got.arity())
      throw TypeError("replacement '" + to_string(*repl) + "' has arity " + std::to_string(got.arity()) +
                      ", location " + describe(s, loc) + " needs " + std::to_string(want.arity()));
    out = with_body(out, loc.path.decl,
                    replace_at(out.body(loc.path.decl), loc.path.steps, normalize_replacement(loc, repl)));
  }
  return out;
}

}  // namespace relfix

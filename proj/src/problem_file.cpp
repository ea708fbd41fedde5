#include "pmi/problem_file.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "pmi/errors.hpp"
#include "pmi/stability.hpp"

namespace pmi {

namespace {

std::string_view trim(std::string_view s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string_view::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

/// Splits off the first whitespace-delimited word.
std::string_view next_word(std::string_view& s) {
  s = trim(s);
  const auto e = s.find_first_of(" \t");
  std::string_view w = s.substr(0, e);
  s = e == std::string_view::npos ? std::string_view{} : trim(s.substr(e));
  return w;
}

double to_double(std::string_view w, int line) {
  double v = 0.0;
  auto res = std::from_chars(w.data(), w.data() + w.size(), v);
  if (res.ec != std::errc{} || res.ptr != w.data() + w.size())
    throw ParseError("line " + std::to_string(line) + ": bad number '" + std::string(w) + "'");
  return v;
}

long long to_int(std::string_view w, int line) {
  long long v = 0;
  auto res = std::from_chars(w.data(), w.data() + w.size(), v);
  if (res.ec != std::errc{} || res.ptr != w.data() + w.size())
    throw ParseError("line " + std::to_string(line) + ": bad integer '" + std::string(w) + "'");
  return v;
}

std::vector<double> numbers(std::string_view rest, int line) {
  std::vector<double> out;
  while (!trim(rest).empty()) out.push_back(to_double(next_word(rest), line));
  return out;
}

}  // namespace

ProblemFile parse_problem(std::string_view text) {
  ProblemFile f;
  bool have_dims = false, have_bounds = false, ended = false, header = false;
  int lineno = 0;
  std::size_t pos = 0;
  auto need_dims = [&](int line) {
    if (!have_dims) throw ParseError("line " + std::to_string(line) + ": 'dims' must come first");
  };
  while (pos <= text.size() && !ended) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    std::string_view rest = line;
    const std::string key(next_word(rest));
    const auto err = [&](const std::string& what) { return ParseError("line " + std::to_string(lineno) + ": " + what); };

    if (!header) {
      if (key != "pmi-problem" || to_int(trim(rest), lineno) != 1) throw err("expected header 'pmi-problem 1'");
      header = true;
    } else if (key == "name") {
      if (rest.empty()) throw err("empty name");
      f.name = std::string(rest);
    } else if (key == "dims") {
      const auto v = numbers(rest, lineno);
      if (v.size() != 3) throw err("dims needs n p m");
      f.universe = Universe{static_cast<int>(v[0]), static_cast<int>(v[1]), static_cast<int>(v[2])};
      if (f.universe.n < 1 || f.universe.p < 0 || f.universe.m < 1) throw DimensionError("dims must satisfy n >= 1, p >= 0, m >= 1");
      if (f.universe.size() > kMaxVars) throw DimensionError("too many variables");
      f.P = MatrixPolynomial(f.universe.m, f.universe);
      have_dims = true;
    } else if (key == "entry") {
      need_dims(lineno);
      const long long i = to_int(next_word(rest), lineno), j = to_int(next_word(rest), lineno);
      if (i < 1 || j < i || j > f.universe.m) throw DimensionError("entry index outside the upper triangle of P");
      f.P.set(static_cast<int>(i - 1), static_cast<int>(j - 1), parse_polynomial(rest, f.universe));
    } else if (key == "uconstraint") {
      need_dims(lineno);
      f.u_constraints.push_back(parse_polynomial(rest, f.universe));
    } else if (key == "ubounds") {
      need_dims(lineno);
      const auto v = numbers(rest, lineno);
      if (static_cast<int>(v.size()) != 2 * f.universe.p) throw DimensionError("ubounds needs two numbers per u");
      f.u_box.clear();
      for (std::size_t k = 0; k < v.size(); k += 2) f.u_box.push_back({v[k], v[k + 1]});
    } else if (key == "bounds") {
      need_dims(lineno);
      const std::string kind(next_word(rest));
      const int n = f.universe.n;
      BoundsSpec b;
      if (kind == "box") {
        b.kind = BoundKind::box;
        const auto v = numbers(rest, lineno);
        if (static_cast<int>(v.size()) != 2 * n) throw DimensionError("box needs two numbers per x");
        for (std::size_t k = 0; k < v.size(); k += 2) b.box.push_back({v[k], v[k + 1]});
      } else if (kind == "ball") {
        b.kind = BoundKind::ball;
        const auto v = numbers(rest, lineno);
        if (static_cast<int>(v.size()) != n + 1) throw DimensionError("ball needs a radius and n center coordinates");
        b.radius = v[0];
        b.center.assign(v.begin() + 1, v.end());
      } else if (kind == "simplex") {
        b.kind = BoundKind::simplex;
        const auto v = numbers(rest, lineno);
        if (static_cast<int>(v.size()) != n * (n + 1)) throw DimensionError("simplex needs n + 1 vertices of n coordinates");
        for (int k = 0; k <= n; ++k) b.vertices.emplace_back(v.begin() + k * n, v.begin() + (k + 1) * n);
      } else if (kind == "stability") {
        b.kind = BoundKind::pushforward;
        b.stability_degree = static_cast<int>(to_int(next_word(rest), lineno));
        if (b.stability_degree != n) throw DimensionError("stability bounds need degree equal to n");
      } else {
        throw err("unknown bounds kind '" + kind + "'");
      }
      f.bounds = std::move(b);
      have_bounds = true;
    } else if (key == "bconstraint") {
      need_dims(lineno);
      f.b_extra.push_back(parse_polynomial(rest, f.universe));
    } else if (key == "option") {
      const std::string opt(next_word(rest));
      auto& o = f.options;
      if (opt == "degrees") {
        o.degrees.clear();
        while (!trim(rest).empty()) o.degrees.push_back(static_cast<int>(to_int(next_word(rest), lineno)));
      } else if (opt == "variant") {
        o.variant = parse_variant(std::string(trim(rest)));
      } else if (opt == "tol") {
        o.tol = to_double(trim(rest), lineno);
      } else if (opt == "seed") {
        o.seed = static_cast<unsigned long long>(to_int(trim(rest), lineno));
      } else if (opt == "ugrid") {
        o.ugrid = static_cast<int>(to_int(trim(rest), lineno));
      } else if (opt == "guard") {
        const auto w = trim(rest);
        if (w != "on" && w != "off") throw err("guard must be on or off");
        o.guard = w == "on";
      } else if (opt == "multiplier-order") {
        o.multiplier_order = static_cast<int>(to_int(trim(rest), lineno));
      } else {
        throw err("unknown option '" + opt + "'");
      }
    } else if (key == "end") {
      ended = true;
    } else {
      throw err("unknown statement '" + key + "'");
    }
  }
  if (!header) throw ParseError("missing header 'pmi-problem 1'");
  if (!have_dims) throw ParseError("missing 'dims'");
  if (!have_bounds) throw ParseError("missing 'bounds'");
  if (!ended) throw ParseError("missing 'end'");
  if (f.universe.p > 0 && f.u_box.empty()) throw DimensionError("problems with u need 'ubounds'");
  return f;
}

std::string print_problem(const ProblemFile& f) {
  std::ostringstream o;
  const Universe& U = f.universe;
  o << "pmi-problem 1\n";
  if (!f.name.empty()) o << "name " << f.name << '\n';
  o << "dims " << U.n << ' ' << U.p << ' ' << U.m << '\n';
  for (int i = 0; i < f.P.size(); ++i)
    for (int j = i; j < f.P.size(); ++j)
      if (!f.P.entry(i, j).is_zero()) o << "entry " << i + 1 << ' ' << j + 1 << ' ' << to_string(f.P.entry(i, j)) << '\n';
  for (const auto& a : f.u_constraints) o << "uconstraint " << to_string(a) << '\n';
  if (!f.u_box.empty()) {
    o << "ubounds";
    for (const auto& iv : f.u_box) o << ' ' << format_double(iv.lo) << ' ' << format_double(iv.hi);
    o << '\n';
  }
  const BoundsSpec& b = f.bounds;
  switch (b.kind) {
    case BoundKind::box:
      o << "bounds box";
      for (const auto& iv : b.box) o << ' ' << format_double(iv.lo) << ' ' << format_double(iv.hi);
      break;
    case BoundKind::ball:
      o << "bounds ball " << format_double(b.radius);
      for (double c : b.center) o << ' ' << format_double(c);
      break;
    case BoundKind::simplex:
      o << "bounds simplex";
      for (const auto& v : b.vertices)
        for (double c : v) o << ' ' << format_double(c);
      break;
    case BoundKind::pushforward:
      o << "bounds stability " << b.stability_degree;
      break;
  }
  o << '\n';
  for (const auto& p : f.b_extra) o << "bconstraint " << to_string(p) << '\n';
  const auto& opt = f.options;
  if (!opt.degrees.empty()) {
    o << "option degrees";
    for (int d : opt.degrees) o << ' ' << d;
    o << '\n';
  }
  o << "option variant " << to_string(opt.variant) << '\n';
  o << "option tol " << format_double(opt.tol) << '\n';
  o << "option seed " << opt.seed << '\n';
  o << "option ugrid " << opt.ugrid << '\n';
  o << "option guard " << (opt.guard ? "on" : "off") << '\n';
  if (opt.multiplier_order) o << "option multiplier-order " << *opt.multiplier_order << '\n';
  o << "end\n";
  return o.str();
}

ProblemFile read_problem_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open problem file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_problem(ss.str());
}

MomentSource make_moment_source(const BoundsSpec& b) {
  switch (b.kind) {
    case BoundKind::box: return MomentSource::box(b.box);
    case BoundKind::ball: return MomentSource::ball(b.center, b.radius);
    case BoundKind::simplex: return MomentSource::simplex(b.vertices);
    case BoundKind::pushforward: return MomentSource::pushforward(b.stability_degree);
  }
  throw GeometryError("unknown bounding set");
}

PmiProblem to_pmi_problem(const ProblemFile& f) {
  PmiProblem pb;
  pb.name = f.name;
  pb.universe = f.universe;
  pb.P = f.P;
  pb.a = f.u_constraints;
  pb.moments = make_moment_source(f.bounds);
  pb.b = pb.moments.constraints(f.universe);
  pb.b.insert(pb.b.end(), f.b_extra.begin(), f.b_extra.end());
  pb.u_box = f.u_box;
  pb.archimedean_guard = f.options.guard;
  pb.validate();
  return pb;
}

// ---------------------------------------------------------------- registry

std::vector<std::string> example_names() {
  return {"planar-box", "planar-disk", "hermite3", "hermite4", "hermite4-robust"};
}

namespace {

ProblemFile planar(const std::string& name) {
  ProblemFile f;
  f.name = name;
  f.universe = Universe{2, 0, 2};
  f.P = MatrixPolynomial(2, f.universe);
  f.P.set(0, 0, parse_polynomial("1 - 16*x1*x2", f.universe));
  f.P.set(0, 1, parse_polynomial("x1", f.universe));
  f.P.set(1, 1, parse_polynomial("1 - x1^2 - x2^2", f.universe));
  if (name == "planar-box") {
    f.bounds.kind = BoundKind::box;
    f.bounds.box = {{-1.0, 1.0}, {-1.0, 1.0}};
  } else {
    f.bounds.kind = BoundKind::ball;
    f.bounds.center = {0.0, 0.0};
    f.bounds.radius = 1.0;
  }
  f.options.degrees = {1, 2, 3, 4};
  return f;
}

/// Fourth-degree design z^4 - (2 x1 + x2) z^3 + 2 x1 z + x2 (+ u).
ProblemFile design(bool robust) {
  ProblemFile f;
  f.name = robust ? "hermite4-robust" : "hermite4";
  f.universe = Universe{2, robust ? 1 : 0, 4};
  const Universe& U = f.universe;
  const auto x1 = Polynomial::variable(U, U.x(0)), x2 = Polynomial::variable(U, U.x(1));
  std::vector<Polynomial> img{-(2.0 * x1 + x2), Polynomial(U), 2.0 * x1, x2};
  if (robust) img[3] += Polynomial::variable(U, U.u(0));
  f.P = substitute(hermite_matrix(4).P, img);
  if (robust) {
    f.u_constraints.push_back(parse_polynomial("0.0625 - u1^2", U));
    f.u_box = {{-0.25, 0.25}};
  }
  f.bounds.kind = BoundKind::simplex;
  f.bounds.vertices = {{-0.25, 1.0}, {0.875, -0.5}, {-0.625, -0.5}};
  f.options.degrees = robust ? std::vector<int>{1, 2} : std::vector<int>{1, 2, 3, 4};
  return f;
}

}  // namespace

ProblemFile example_problem(const std::string& name) {
  if (name == "planar-box" || name == "planar-disk") return planar(name);
  if (name == "hermite3") {
    ProblemFile f;
    f.name = name;
    f.universe = Universe{3, 0, 3};
    f.P = hermite_matrix(3, f.universe).P;
    f.bounds.kind = BoundKind::pushforward;
    f.bounds.stability_degree = 3;
    f.options.degrees = {1, 2, 3};
    return f;
  }
  if (name == "hermite4") return design(false);
  if (name == "hermite4-robust") return design(true);
  throw Error("unknown example '" + name + "'");
}

}  // namespace pmi

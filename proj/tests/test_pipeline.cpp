#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "pmi/errors.hpp"
#include "pmi/pipeline.hpp"

using namespace pmi;

namespace {

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

RunOptions quick() {
  RunOptions o;
  o.grid_res = 30;
  o.samples = 20000;
  return o;
}

}  // namespace

TEST_CASE("problem files round trip") {
  for (const auto& name : example_names()) {
    CAPTURE(name);
    const ProblemFile f = example_problem(name);
    const std::string text = print_problem(f);
    const ProblemFile g = parse_problem(text);
    CHECK(print_problem(g) == text);
    CHECK(g.P.size() == f.P.size());
    CHECK_NOTHROW(to_pmi_problem(g).validate());
  }
  CHECK_THROWS_AS(example_problem("nope"), Error);
}

TEST_CASE("shipped fixtures match the built-in examples") {
  for (const auto& name : example_names()) {
    CAPTURE(name);
    const auto path = std::filesystem::path(PMI_EXAMPLES_DIR) / (name + ".pmi");
    CHECK(read_text_file(path.string()) == print_problem(example_problem(name)));
  }
}

TEST_CASE("problem file errors") {
  CHECK_THROWS_AS(parse_problem(""), ParseError);
  CHECK_THROWS_AS(parse_problem("pmi-problem 1\nname x\ndims 2 0 2\nentry 1 1 1 - x3\nbounds box -1 1 -1 1\nend\n"),
                  ParseError);
  CHECK_THROWS_AS(parse_problem("pmi-problem 1\nname x\ndims 2 0 2\nentry 1 1 1\nbounds wobble 1\nend\n"), ParseError);
  CHECK_THROWS_AS(read_problem_file("/nonexistent/problem.pmi"), IoError);
  const ProblemFile f = parse_problem(
      "pmi-problem 1\n# comment\nname tiny\ndims 1 0 1\nentry 1 1 1 - x1^2\nbounds box -1 1\noption degrees 1 2\nend\n");
  CHECK(f.name == "tiny");
  CHECK(f.options.degrees == std::vector<int>{1, 2});
  CHECK(f.bounds.kind == BoundKind::box);
}

TEST_CASE("artifacts round trip") {
  const ProblemFile f = example_problem("planar-box");
  const Artifact a = run_solve(f, 2, VariantKind::plain, nullptr, quick());
  CHECK(a.status == SdpStatus::optimal);
  REQUIRE(a.soundness.has_value());
  CHECK(a.soundness->violations == 0);
  CHECK(a.verified());
  const std::string text = write_artifact(a);
  const Artifact b = parse_artifact(text);
  CHECK(write_artifact(b) == text);
  CHECK(b.g == a.g.drop_small(1e-12));
  CHECK(b.objective == a.objective);
  CHECK(b.degree == 2);
  CHECK_THROWS_AS(parse_artifact("pmi-artifact 1\ndegree 2\n"), ParseError);
  CHECK_THROWS_AS(parse_artifact("garbage"), ParseError);
  CHECK_THROWS_AS(read_artifact_file("/nonexistent/a.art"), IoError);
  CHECK_THROWS_AS(write_text_file("/nonexistent/dir/a.art", text), IoError);
}

TEST_CASE("solves are deterministic") {
  const ProblemFile f = example_problem("planar-disk");
  const Artifact a = run_solve(f, 2, VariantKind::plain, nullptr, quick());
  const Artifact b = run_solve(f, 2, VariantKind::plain, nullptr, quick());
  CHECK(write_artifact(a) == write_artifact(b));
  const std::string ra = verify_report(a, quick()), rb = verify_report(b, quick());
  CHECK(ra == rb);
}

TEST_CASE("degree errors and order lifting") {
  const ProblemFile f = example_problem("planar-box");
  CHECK_THROWS_AS(run_solve(f, 1, VariantKind::plain, nullptr, quick()), DegreeError);
  RunOptions lift = quick();
  lift.lift_order = true;
  const Artifact a = run_solve(f, 1, VariantKind::plain, nullptr, lift);
  CHECK(a.order == 2);
  CHECK_THROWS_AS(run_solve(f, 2, VariantKind::nested, nullptr, quick()), Error);
}

TEST_CASE("sweep CSV") {
  const ProblemFile f = example_problem("planar-box");
  const auto rows = run_sweep(f, 1, 3, VariantKind::nested, quick());
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].order == 2);
  CHECK_FALSE(rows[0].nested_min.has_value());
  for (std::size_t i = 1; i < rows.size(); ++i) {
    REQUIRE(rows[i].nested_min.has_value());
    CHECK(*rows[i].nested_min >= -1e-7);
  }
  const auto csv = lines_of(sweep_csv(rows, true));
  REQUIRE(csv.size() == 4);
  CHECK(csv[0] == "d,order,status,objective,rho,rho_se,volume,volume_se,violations,nested_min");
  CHECK(csv[1].rfind("1,2,optimal,", 0) == 0);
  CHECK(lines_of(sweep_csv(rows, false))[0] == "d,order,status,objective,rho,rho_se,volume,volume_se,violations");
  CHECK_THROWS_AS(run_sweep(f, 3, 2, VariantKind::plain, quick()), Error);
}

TEST_CASE("sections and grid CSV") {
  const Section s2 = parse_section("", 2);
  CHECK(s2.axes[0] == 0);
  CHECK(s2.axes[1] == 1);
  const Section s3 = parse_section("x3=0", 3);
  CHECK(s3.axes[0] == 0);
  CHECK(s3.axes[1] == 1);
  CHECK(s3.fixed[2] == 0.0);
  const Section s4 = parse_section("x1=0.5,x3=0", 4);
  CHECK(s4.axes[0] == 1);
  CHECK(s4.axes[1] == 3);
  CHECK(s4.fixed[0] == 0.5);
  CHECK_THROWS_AS(parse_section("", 3), DimensionError);
  CHECK_THROWS_AS(parse_section("x9=0", 3), DimensionError);
  CHECK_THROWS_AS(parse_section("y=1", 3), ParseError);

  RunOptions o = quick();
  o.lift_order = true;
  const Artifact a = run_solve(example_problem("hermite3"), 1, VariantKind::plain, nullptr, o);
  const auto rows = lines_of(grid_csv(a, 20, s3));
  REQUIRE(rows.size() == 401);
  CHECK(rows[0] == "x1,x2,g,lambda");
  // g >= 0 implies lambda >= 0 on every row
  for (std::size_t i = 1; i < rows.size(); ++i) {
    double x, y, g, lam;
    char c;
    std::istringstream in(rows[i]);
    in >> x >> c >> y >> c >> g >> c >> lam;
    if (g >= 1e-6) CHECK(lam >= -1e-9);
  }
}

TEST_CASE("verification report") {
  const Artifact a = run_solve(example_problem("planar-box"), 2, VariantKind::plain, nullptr, quick());
  bool ok = false;
  const std::string r = verify_report(a, quick(), &ok);
  CHECK(ok);
  CHECK(r.find("\"verified\": true") != std::string::npos);
  CHECK(r.find("\"l1_gap\"") != std::string::npos);
}

TEST_CASE("moments table and SDP export") {
  const ProblemFile f = example_problem("planar-box");
  const auto table = lines_of(moments_table(f, 2));
  CHECK(table.size() == 7);
  CHECK(table[0] == "a1,a2,moment");
  CHECK(table[1] == "0,0,4");
  CHECK_THROWS_AS(moments_table(f, -1), DegreeError);
  const std::string sdp = export_sdp_text(f, 2, VariantKind::plain, nullptr, quick());
  CHECK_FALSE(sdp.empty());
}

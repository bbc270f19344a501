#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "prodsurf/fixtures.hpp"
#include "prodsurf/frame_reconstruct.hpp"
#include "prodsurf/io.hpp"

using namespace prodsurf;

TEST_CASE("field round trip is exact") {
  ScalarField f = sample(square_grid(7, 1.5), [](double x, double y) { return std::sin(3 * x) / (1 + y * y) + 1e-300; });
  std::stringstream ss;
  write_field(ss, f);
  const ScalarField g = read_field(ss);
  CHECK(g.grid == f.grid);
  CHECK(g.values == f.values);
}

TEST_CASE("patch round trips") {
  const ImmersedPatch chart = diagonal_fixture(9);
  std::stringstream ss;
  write_patch(ss, chart, {{"fixture", "diagonal"}});
  Summary s;
  const ImmersedPatch back = read_patch(ss, &s);
  CHECK(s.at("fixture") == "diagonal");
  CHECK(back.grid == chart.grid);
  CHECK(back.model.first.representation() == Representation::chart);
  for (std::size_t k = 0; k < chart.grid.size(); ++k) CHECK(back.points[k] == chart.points[k]);

  const ScalarField zero(torus_grid(16), 0.0);
  const Reconstruction rec = integrate(build_data(zero, zero, 0.3));
  std::stringstream se;
  write_patch(se, rec.patch);
  const ImmersedPatch emb = read_patch(se);
  CHECK(emb.model.second.representation() == Representation::embedded);
  CHECK(emb.model.second.kind() == FactorKind::sphere);
  for (std::size_t k = 0; k < emb.grid.size(); ++k) CHECK(emb.points[k] == rec.patch.points[k]);
}

TEST_CASE("mesh round trips, including deck shifts") {
  for (const TriMesh& m : {slice_icosphere(1), geodesic_torus_h2(4, 5, 1.0, 0.7)}) {
    std::stringstream ss;
    write_mesh(ss, m);
    const TriMesh r = read_mesh(ss);
    CHECK(r.factors == m.factors);
    CHECK(r.faces == m.faces);
    CHECK(r.shifts == m.shifts);
    CHECK(r.decks.size() == m.decks.size());
    for (std::size_t i = 0; i < m.vertices.size(); ++i) CHECK(r.vertices[i] == m.vertices[i]);
    CHECK(area(r) == area(m));
  }
}

TEST_CASE("malformed input") {
  auto field = [](const std::string& s) {
    std::istringstream in(s);
    return read_field(in);
  };
  CHECK_THROWS_AS(field(""), FormatError);
  CHECK_THROWS_AS(field("prodsurf patch 1\n"), FormatError);
  CHECK_THROWS_AS(field("prodsurf field 2\n"), FormatError);
  CHECK_THROWS_AS(field("prodsurf field 1\ndata\n"), FormatError);
  CHECK_THROWS_AS(field("prodsurf field 1\ngrid 2 1 0 0 1 0 0\ndata\n1\n"), FormatError);
  CHECK_THROWS_AS(field("prodsurf field 1\ngrid 2 1 0 0 1 0 0\ndata\n1 x\n"), FormatError);
  CHECK_THROWS_AS(field("prodsurf field 1\ngrid 2 1 0 0 1 0 0\ndata\n1 2\n3 4\n"), FormatError);
  CHECK_NOTHROW(field("# comment\nprodsurf field 1\ngrid 2 1 0 0 1 0 0\ndata\n1 2\nsummary\nnote fine\n"));

  auto patch = [](const std::string& s) {
    std::istringstream in(s);
    return read_patch(in);
  };
  CHECK_THROWS_AS(patch("prodsurf patch 1\nfactors sphere\nrepresentation chart\ngrid 1 1 0 0 1 0 0\ndata\n0 0 0 0\n"),
                  FormatError);
  CHECK_THROWS_AS(patch("prodsurf patch 1\nfactors sphere torus\nrepresentation chart\ngrid 1 1 0 0 1 0 0\ndata\n"),
                  FormatError);
  CHECK_THROWS_AS(patch("prodsurf patch 1\nfactors sphere sphere\nrepresentation polar\ngrid 1 1 0 0 1 0 0\ndata\n"),
                  FormatError);

  auto mesh = [](const std::string& s) {
    std::istringstream in(s);
    return read_mesh(in);
  };
  CHECK_THROWS_AS(mesh("PLY\n"), FormatError);
  CHECK_THROWS_AS(mesh("OFF\nfactors sphere sphere\n1 1 0\n1 0 0 1 0 0\n4 0 0 0 0\n"), FormatError);
  CHECK_THROWS_AS(mesh("OFF\nfactors s2 s2\n1 1 0\n1 0 0 1 0 0\n3 0 0 0\nextra\n"), FormatError);
}

#include "prodsurf/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

namespace prodsurf {

namespace {

constexpr int kVersion = 1;

std::vector<std::string> tokens(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  for (std::string t; is >> t;) out.push_back(t);
  return out;
}

double to_double(const std::string& s) {
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw FormatError("not a number: '" + s + "'");
  }
  if (pos != s.size()) throw FormatError("not a number: '" + s + "'");
  return v;
}

int to_int(const std::string& s) {
  std::size_t pos = 0;
  int v = 0;
  try {
    v = std::stoi(s, &pos);
  } catch (const std::exception&) {
    throw FormatError("not an integer: '" + s + "'");
  }
  if (pos != s.size()) throw FormatError("not an integer: '" + s + "'");
  return v;
}

// Next non-empty, non-comment line; false at end of stream.
bool next_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    const auto p = line.find_first_not_of(" \t\r");
    if (p == std::string::npos || line[p] == '#') continue;
    line.erase(line.find_last_not_of(" \t\r") + 1);
    return true;
  }
  return false;
}

std::string required_line(std::istream& in, const char* what) {
  std::string line;
  if (!next_line(in, line)) throw FormatError(std::string("unexpected end of file, expected ") + what);
  return line;
}

struct Header {
  std::map<std::string, std::vector<std::string>> keys;
  const std::vector<std::string>& at(const std::string& k) const {
    auto it = keys.find(k);
    if (it == keys.end()) throw FormatError("missing header line '" + k + "'");
    return it->second;
  }
};

Header read_header(std::istream& in, const std::string& kind) {
  const auto first = tokens(required_line(in, "header"));
  if (first.size() != 3 || first[0] != "prodsurf" || first[1] != kind)
    throw FormatError("expected 'prodsurf " + kind + " " + std::to_string(kVersion) + "'");
  if (to_int(first[2]) != kVersion) throw FormatError("unsupported format version " + first[2]);
  Header h;
  for (;;) {
    auto t = tokens(required_line(in, "'data'"));
    if (t[0] == "data") break;
    const std::string key = t[0];
    t.erase(t.begin());
    h.keys[key] = std::move(t);
  }
  return h;
}

void write_grid(std::ostream& out, const GridSpec& g) {
  out << "grid " << g.nx << ' ' << g.ny << ' ' << g.x0 << ' ' << g.y0 << ' ' << g.h << ' ' << g.periodic_x << ' '
      << g.periodic_y << '\n';
}

GridSpec parse_grid(const std::vector<std::string>& t) {
  if (t.size() != 7) throw FormatError("grid line needs nx ny x0 y0 h periodic_x periodic_y");
  GridSpec g;
  g.nx = to_int(t[0]);
  g.ny = to_int(t[1]);
  g.x0 = to_double(t[2]);
  g.y0 = to_double(t[3]);
  g.h = to_double(t[4]);
  g.periodic_x = to_int(t[5]) != 0;
  g.periodic_y = to_int(t[6]) != 0;
  if (g.nx <= 0 || g.ny <= 0 || !(g.h > 0)) throw FormatError("grid must have positive sizes and spacing");
  return g;
}

std::vector<double> read_row(std::istream& in, std::size_t n, const char* what) {
  const auto t = tokens(required_line(in, what));
  if (t.size() != n) throw FormatError(std::string(what) + " row has " + std::to_string(t.size()) + " values, expected " +
                                       std::to_string(n));
  std::vector<double> v;
  for (const auto& s : t) v.push_back(to_double(s));
  return v;
}

void read_summary(std::istream& in, Summary* summary) {
  std::string line;
  if (!next_line(in, line)) return;
  if (line != "summary") throw FormatError("trailing content after data block");
  while (next_line(in, line)) {
    const auto p = line.find(' ');
    const std::string key = line.substr(0, p);
    const std::string val = p == std::string::npos ? "" : line.substr(line.find_first_not_of(' ', p));
    if (summary) (*summary)[key] = val;
  }
}

FactorModel factor_model(const std::string& name, bool embedded) {
  const FactorKind k = [&] {
    try {
      return factor_kind_from_string(name);
    } catch (const std::invalid_argument& e) {
      throw FormatError(e.what());
    }
  }();
  if (k == FactorKind::conformal) throw FormatError("conformal factors cannot be stored in patch files");
  if (embedded) return FactorModel::embedded(k);
  return FactorModel::chart(k == FactorKind::sphere       ? SurfaceFactor::sphere()
                            : k == FactorKind::hyperbolic ? SurfaceFactor::hyperbolic()
                                                          : SurfaceFactor::flat());
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path + "'");
  return in;
}

struct PrecisionGuard {
  std::ostream& out;
  std::streamsize old;
  explicit PrecisionGuard(std::ostream& o) : out(o), old(o.precision(17)) {}
  ~PrecisionGuard() { out.precision(old); }
};

}  // namespace

void write_field(std::ostream& out, const ScalarField& f) {
  PrecisionGuard p(out);
  out << "prodsurf field " << kVersion << '\n';
  write_grid(out, f.grid);
  out << "data\n";
  for (int j = 0; j < f.grid.ny; ++j) {
    for (int i = 0; i < f.grid.nx; ++i) out << (i ? " " : "") << f(i, j);
    out << '\n';
  }
}

ScalarField read_field(std::istream& in) {
  const Header h = read_header(in, "field");
  ScalarField f(parse_grid(h.at("grid")));
  for (int j = 0; j < f.grid.ny; ++j) {
    const auto row = read_row(in, f.grid.nx, "field");
    for (int i = 0; i < f.grid.nx; ++i) f(i, j) = row[i];
  }
  read_summary(in, nullptr);
  return f;
}

void write_patch(std::ostream& out, const ImmersedPatch& patch, const Summary& summary) {
  const bool embedded = patch.model.first.representation() == Representation::embedded;
  PrecisionGuard p(out);
  out << "prodsurf patch " << kVersion << '\n';
  out << "factors " << to_string(patch.model.first.kind()) << ' ' << to_string(patch.model.second.kind()) << '\n';
  out << "representation " << (embedded ? "embedded" : "chart") << '\n';
  write_grid(out, patch.grid);
  out << "columns " << (embedded ? "p0 p1 p2 q0 q1 q2" : "x1 x2 y1 y2") << '\n';
  out << "data\n";
  for (std::size_t k = 0; k < patch.grid.size(); ++k) {
    const Vec6& v = patch.points[k];
    if (embedded)
      out << v(0) << ' ' << v(1) << ' ' << v(2) << ' ' << v(3) << ' ' << v(4) << ' ' << v(5) << '\n';
    else
      out << v(0) << ' ' << v(1) << ' ' << v(3) << ' ' << v(4) << '\n';
  }
  if (!summary.empty()) {
    out << "summary\n";
    for (const auto& [k, v] : summary) out << k << ' ' << v << '\n';
  }
}

ImmersedPatch read_patch(std::istream& in, Summary* summary) {
  const Header h = read_header(in, "patch");
  const auto& f = h.at("factors");
  if (f.size() != 2) throw FormatError("factors line needs two kinds");
  const auto& r = h.at("representation");
  if (r.size() != 1 || (r[0] != "chart" && r[0] != "embedded"))
    throw FormatError("representation must be chart or embedded");
  const bool embedded = r[0] == "embedded";
  ImmersedPatch patch(parse_grid(h.at("grid")), ProductModel{factor_model(f[0], embedded), factor_model(f[1], embedded)});
  const std::size_t cols = embedded ? 6 : 4;
  for (std::size_t k = 0; k < patch.grid.size(); ++k) {
    const auto v = read_row(in, cols, "patch");
    Vec6& p = patch.points[k];
    if (embedded)
      p << v[0], v[1], v[2], v[3], v[4], v[5];
    else
      p << v[0], v[1], 0.0, v[2], v[3], 0.0;
  }
  read_summary(in, summary);
  return patch;
}

void write_mesh(std::ostream& out, const TriMesh& mesh) {
  PrecisionGuard p(out);
  out << "OFF\n";
  out << "factors " << to_string(mesh.factors[0]) << ' ' << to_string(mesh.factors[1]) << '\n';
  for (const DeckGenerator& d : mesh.decks) {
    out << "deck";
    for (const Mat3* m : {&d.first, &d.second})
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) out << ' ' << (*m)(r, c);
    out << '\n';
  }
  out << mesh.vertices.size() << ' ' << mesh.faces.size() << " 0\n";
  for (const Vec6& v : mesh.vertices)
    out << v(0) << ' ' << v(1) << ' ' << v(2) << ' ' << v(3) << ' ' << v(4) << ' ' << v(5) << '\n';
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto& t = mesh.faces[f];
    out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2];
    if (mesh.has_shifts())
      for (const auto& s : mesh.shifts[f]) out << ' ' << s[0] << ' ' << s[1];
    out << '\n';
  }
}

TriMesh read_mesh(std::istream& in) {
  if (tokens(required_line(in, "OFF header")) != std::vector<std::string>{"OFF"}) throw FormatError("expected OFF");
  TriMesh m;
  auto t = tokens(required_line(in, "factors line"));
  if (t.size() != 3 || t[0] != "factors") throw FormatError("expected 'factors <kind> <kind>'");
  for (int f = 0; f < 2; ++f) {
    const std::string& s = t[f + 1];
    const std::string name = s == "s2" ? "sphere" : s == "h2" ? "hyperbolic" : s == "r2" ? "flat" : s;
    m.factors[f] = factor_model(name, true).kind();
  }
  t = tokens(required_line(in, "counts"));
  while (t[0] == "deck") {
    if (t.size() != 19) throw FormatError("deck line needs 18 numbers");
    DeckGenerator d;
    for (int k = 0; k < 18; ++k) (k < 9 ? d.first : d.second)((k % 9) / 3, k % 3) = to_double(t[k + 1]);
    m.decks.push_back(d);
    t = tokens(required_line(in, "counts"));
  }
  if (t.size() != 3) throw FormatError("expected 'V F E' counts");
  const int V = to_int(t[0]), F = to_int(t[1]);
  if (V <= 0 || F <= 0) throw FormatError("mesh counts must be positive");
  for (int i = 0; i < V; ++i) {
    const auto v = read_row(in, 6, "vertex");
    Vec6 x;
    x << v[0], v[1], v[2], v[3], v[4], v[5];
    m.vertices.push_back(x);
  }
  for (int f = 0; f < F; ++f) {
    t = tokens(required_line(in, "face"));
    if (t.empty() || t[0] != "3") throw FormatError("only triangular faces are supported");
    if (t.size() != 4 && t.size() != 10) throw FormatError("face line has the wrong number of entries");
    m.faces.push_back({to_int(t[1]), to_int(t[2]), to_int(t[3])});
    if (t.size() == 10) {
      if (m.shifts.size() != static_cast<std::size_t>(f)) throw FormatError("shifts must be given for every face");
      m.shifts.push_back({TriMesh::Shift{to_int(t[4]), to_int(t[5])}, TriMesh::Shift{to_int(t[6]), to_int(t[7])},
                          TriMesh::Shift{to_int(t[8]), to_int(t[9])}});
    } else if (!m.shifts.empty()) {
      throw FormatError("shifts must be given for every face");
    }
  }
  std::string rest;
  if (next_line(in, rest)) throw FormatError("trailing content after faces");
  return m;
}

void write_node_table(std::ostream& out, const Analysis& a) {
  PrecisionGuard p(out);
  const FundamentalData& d = a.data;
  const GridSpec& g = d.grid;
  out << "i,j,x,y,u,C1,C2,ReA,ImA,Re_gamma1,Im_gamma1,Re_gamma2,Im_gamma2,Re_f1,Im_f1,Re_f2,Im_f2,H,K,Kperp,M1,M2\n";
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t k = g.index(i, j);
      out << i << ',' << j << ',' << g.x(i) << ',' << g.y(j) << ',' << d.u[k] << ',' << d.C1[k] << ',' << d.C2[k];
      for (const ComplexField* c : {&d.A, &d.gamma1, &d.gamma2, &d.f1, &d.f2})
        out << ',' << (*c)[k].real() << ',' << (*c)[k].imag();
      out << ',' << a.second.H_norm[k] << ',' << a.curvature.K[k] << ',' << a.curvature.Kperp[k] << ','
          << a.curvature.M1[k] << ',' << a.curvature.M2[k] << '\n';
    }
}

ScalarField load_field(const std::string& path) {
  auto in = open_in(path);
  return read_field(in);
}

ImmersedPatch load_patch(const std::string& path, Summary* summary) {
  auto in = open_in(path);
  return read_patch(in, summary);
}

TriMesh load_mesh(const std::string& path) {
  auto in = open_in(path);
  return read_mesh(in);
}

void save_text(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw FormatError("cannot write '" + path + "'");
    out << content;
    if (!out.flush()) throw FormatError("cannot write '" + path + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw FormatError("cannot write '" + path + "': " + ec.message());
}

}  // namespace prodsurf

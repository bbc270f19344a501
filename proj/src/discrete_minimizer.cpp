#include "prodsurf/discrete_minimizer.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <unsupported/Eigen/AutoDiff>

#include "prodsurf/factor_model.hpp"
#include "prodsurf/parallel.hpp"

namespace prodsurf {

namespace {

template <class T>
using V3 = Eigen::Matrix<T, 3, 1>;

template <class T>
T lorentz(const V3<T>& x, const V3<T>& y) {
  return -x(0) * y(0) + x(1) * y(1) + x(2) * y(2);
}

const FactorModel& model(FactorKind k) {
  static const FactorModel sphere = FactorModel::embedded(FactorKind::sphere);
  static const FactorModel hyper = FactorModel::embedded(FactorKind::hyperbolic);
  static const FactorModel flat = FactorModel::embedded(FactorKind::flat);
  switch (k) {
    case FactorKind::sphere: return sphere;
    case FactorKind::hyperbolic: return hyper;
    case FactorKind::flat: return flat;
    default: throw MeshError("mesh factors must be sphere, hyperbolic or flat");
  }
}

const EmbeddingModel& embedding(FactorKind k) {
  static const EmbeddingModel sphere(FactorKind::sphere), hyper(FactorKind::hyperbolic), flat(FactorKind::flat);
  return k == FactorKind::sphere ? sphere : (k == FactorKind::hyperbolic ? hyper : flat);
}

double factor_metric(FactorKind k, const Vec3& x, const Vec3& y) {
  return k == FactorKind::hyperbolic ? lorentz<double>(x, y) : x.dot(y);
}

// Adds the Gram contribution of one factor. Spheres and planes use chordal
// edges as they are; hyperbolic edges are projected to T_c at the normalized
// barycenter because chords of the hyperboloid can be timelike.
template <class T>
void accumulate_gram(FactorKind kind, const V3<T>& p0, const V3<T>& p1, const V3<T>& p2, T& aa, T& bb, T& ab) {
  V3<T> a = p1 - p0, b = p2 - p0;
  if (kind == FactorKind::hyperbolic) {
    using std::sqrt;
    V3<T> c = (p0 + p1 + p2) / T(3);
    c /= sqrt(-lorentz<T>(c, c));
    a += lorentz<T>(c, a) * c;
    b += lorentz<T>(c, b) * c;
    aa += lorentz<T>(a, a);
    bb += lorentz<T>(b, b);
    ab += lorentz<T>(a, b);
  } else {
    aa += a.dot(a);
    bb += b.dot(b);
    ab += a.dot(b);
  }
}

template <class T>
void gram_of(const std::array<FactorKind, 2>& kinds, const std::array<Eigen::Matrix<T, 6, 1>, 3>& P, T& aa, T& bb,
             T& ab) {
  aa = bb = ab = T(0);
  for (int f = 0; f < 2; ++f)
    accumulate_gram<T>(kinds[f], P[0].template segment<3>(3 * f), P[1].template segment<3>(3 * f),
                       P[2].template segment<3>(3 * f), aa, bb, ab);
}

bool degenerate(const FaceGram& g) {
  const double D = g.aa * g.bb - g.ab * g.ab;
  return !(D > 1e-28 * g.aa * g.bb) || !(g.aa > 0) || !(g.bb > 0);
}

[[noreturn]] void throw_degenerate(std::size_t f) {
  throw DegenerateFaceError(f, "degenerate face " + std::to_string(f));
}

FaceGram checked_gram(const TriMesh& mesh, std::size_t f) {
  const FaceGram g = face_gram(mesh, f);
  if (degenerate(g)) throw_degenerate(f);
  return g;
}

Mat3 power(const Mat3& M, int e) {
  Mat3 out = Mat3::Identity();
  const Mat3 base = e >= 0 ? M : Mat3(M.inverse());
  for (int k = 0; k < std::abs(e); ++k) out = base * out;
  return out;
}

double tangent_norm(const TriMesh& mesh, const Vec6& v) {
  double s = 0;
  for (int f = 0; f < 2; ++f) {
    const Vec3 x = v.segment<3>(3 * f);
    s += factor_metric(mesh.factors[f], x, x);
  }
  return std::sqrt(std::max(0.0, s));
}

bool any_hyperbolic(const TriMesh& m) {
  return m.factors[0] == FactorKind::hyperbolic || m.factors[1] == FactorKind::hyperbolic;
}

}  // namespace

// ---------------------------------------------------------------- mesh basics

Eigen::Matrix<double, 6, 6> TriMesh::corner_map(std::size_t face, int corner) const {
  Eigen::Matrix<double, 6, 6> M = Eigen::Matrix<double, 6, 6>::Identity();
  if (!has_shifts()) return M;
  const Shift& s = shifts[face][corner];
  Mat3 A = Mat3::Identity(), B = Mat3::Identity();
  for (int g = 0; g < 2; ++g) {
    if (s[g] == 0) continue;
    A = power(decks.at(g).first, s[g]) * A;
    B = power(decks.at(g).second, s[g]) * B;
  }
  M.topLeftCorner<3, 3>() = A;
  M.bottomRightCorner<3, 3>() = B;
  return M;
}

Vec6 TriMesh::corner(std::size_t face, int c) const {
  const Vec6& v = vertices[faces[face][c]];
  if (!has_shifts()) return v;
  const Shift& s = shifts[face][c];
  if (s[0] == 0 && s[1] == 0) return v;
  return corner_map(face, c) * v;
}

double quadric_violation(const TriMesh& mesh) {
  double m = 0;
  for (const Vec6& v : mesh.vertices)
    for (int f = 0; f < 2; ++f) m = std::max(m, std::abs(embedding(mesh.factors[f]).quadric_residual(v.segment<3>(3 * f))));
  return m;
}

void validate_mesh(const TriMesh& mesh, double quadric_tol) {
  for (FactorKind k : mesh.factors) (void)model(k);
  if (mesh.vertices.empty() || mesh.faces.empty()) throw MeshError("mesh is empty");
  if (mesh.has_shifts() && mesh.shifts.size() != mesh.faces.size()) throw MeshError("shift table size mismatch");
  if (mesh.decks.size() > 2) throw MeshError("at most two deck generators");
  const int V = static_cast<int>(mesh.vertices.size());
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto& t = mesh.faces[f];
    for (int c = 0; c < 3; ++c)
      if (t[c] < 0 || t[c] >= V) throw MeshError("face " + std::to_string(f) + " has an out-of-range vertex");
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
      throw MeshError("face " + std::to_string(f) + " repeats a vertex");
    if (mesh.has_shifts())
      for (const auto& s : mesh.shifts[f])
        for (int g = 0; g < 2; ++g)
          if (s[g] != 0 && g >= static_cast<int>(mesh.decks.size()))
            throw MeshError("face " + std::to_string(f) + " uses a missing deck generator");
  }
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i)
    for (int f = 0; f < 2; ++f)
      if (!(std::abs(embedding(mesh.factors[f]).quadric_residual(mesh.vertices[i].segment<3>(3 * f))) <= quadric_tol))
        throw MeshError("vertex " + std::to_string(i) + " is off its quadric");
  std::map<std::pair<int, int>, int> directed;
  for (const auto& t : mesh.faces)
    for (int c = 0; c < 3; ++c) ++directed[{t[c], t[(c + 1) % 3]}];
  for (const auto& [e, n] : directed) {
    if (n != 1) throw MeshError("faces are not consistently oriented");
    if (!directed.count({e.second, e.first})) throw MeshError("mesh is not closed");
  }
}

double FaceGram::area() const { return 0.5 * std::sqrt(std::max(0.0, aa * bb - ab * ab)); }

FaceGram face_gram(const TriMesh& mesh, std::size_t f) {
  const std::array<Vec6, 3> P{mesh.corner(f, 0), mesh.corner(f, 1), mesh.corner(f, 2)};
  FaceGram g;
  gram_of<double>(mesh.factors, P, g.aa, g.bb, g.ab);
  return g;
}

double face_area(const TriMesh& mesh, std::size_t f) { return checked_gram(mesh, f).area(); }

double area(const TriMesh& mesh) {
  double s = 0;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) s += face_area(mesh, f);
  return s;
}

// ------------------------------------------------------------------ gradient

double AreaGradient::sup_norm() const {
  double m = 0;
  for (double v : norm) m = std::max(m, v);
  return m;
}

Eigen::Matrix<double, 6, 4> tangent_frame(const TriMesh& mesh, const Vec6& v) {
  Eigen::Matrix<double, 6, 4> E = Eigen::Matrix<double, 6, 4>::Zero();
  for (int f = 0; f < 2; ++f) {
    const FactorModel& m = model(mesh.factors[f]);
    const Vec3 p = v.segment<3>(3 * f);
    const Vec3 e = m.unit_tangent(p);
    E.block<3, 1>(3 * f, 2 * f) = e;
    E.block<3, 1>(3 * f, 2 * f + 1) = m.j<double>(p, e);
  }
  return E;
}

namespace {

// Coordinates of the Riemannian gradient in the frame (e₁, je₁, e₂, je₂):
// cᵢ = dA(eᵢ) = ∂A·eᵢ, valid for Lorentzian factors too.
Eigen::Vector4d frame_coords(const Eigen::Matrix<double, 6, 4>& E, const Vec6& partial) {
  return E.transpose() * partial;
}

// Metric pairing of a tangent vector with the frame columns.
Eigen::Vector4d metric_coords(const TriMesh& mesh, const Eigen::Matrix<double, 6, 4>& E, const Vec6& w) {
  Eigen::Vector4d c;
  for (int i = 0; i < 4; ++i) {
    const int f = i / 2;
    c(i) = factor_metric(mesh.factors[f], E.block<3, 1>(3 * f, i), w.segment<3>(3 * f));
  }
  return c;
}

}  // namespace

AreaGradient area_gradient(const TriMesh& mesh) {
  using AD = Eigen::AutoDiffScalar<Eigen::Matrix<double, 18, 1>>;
  const std::size_t F = mesh.faces.size(), V = mesh.vertices.size();
  std::vector<std::array<Vec6, 3>> face_grad(F);
  std::vector<char> bad(F, 0);
  parallel_for(F, [&](std::size_t f) {
    std::array<Eigen::Matrix<AD, 6, 1>, 3> P;
    for (int c = 0; c < 3; ++c) {
      const Vec6 x = mesh.corner(f, c);
      for (int i = 0; i < 6; ++i) P[c](i) = AD(x(i), 18, 6 * c + i);
    }
    AD aa, bb, ab;
    gram_of<AD>(mesh.factors, P, aa, bb, ab);
    const FaceGram g{aa.value(), bb.value(), ab.value()};
    if (degenerate(g)) {
      bad[f] = 1;
      return;
    }
    using std::sqrt;
    const AD A = 0.5 * sqrt(aa * bb - ab * ab);
    for (int c = 0; c < 3; ++c) {
      const Vec6 d = A.derivatives().segment<6>(6 * c);
      face_grad[f][c] = mesh.has_shifts() ? Vec6(mesh.corner_map(f, c).transpose() * d) : d;
    }
  });
  for (std::size_t f = 0; f < F; ++f)
    if (bad[f]) throw_degenerate(f);

  AreaGradient out;
  out.partial.assign(V, Vec6::Zero());
  // Serial accumulation keeps the summation order independent of threads.
  for (std::size_t f = 0; f < F; ++f)
    for (int c = 0; c < 3; ++c) out.partial[mesh.faces[f][c]] += face_grad[f][c];
  out.tangent.resize(V);
  out.norm.resize(V);
  parallel_for(V, [&](std::size_t i) {
    const auto E = tangent_frame(mesh, mesh.vertices[i]);
    const Eigen::Vector4d c = frame_coords(E, out.partial[i]);
    out.tangent[i] = E * c;
    out.norm[i] = c.norm();
  });
  return out;
}

double directional_derivative(const AreaGradient& g, const std::vector<Vec6>& direction) {
  if (direction.size() != g.partial.size()) throw std::invalid_argument("direction size mismatch");
  double s = 0;
  for (std::size_t i = 0; i < direction.size(); ++i) s += g.partial[i].dot(direction[i]);
  return s;
}

std::vector<Vec6> normal_gradient(const TriMesh& mesh, const AreaGradient& g) {
  const std::size_t V = mesh.vertices.size();
  std::vector<std::vector<Vec6>> ring(V);
  for (std::size_t f = 0; f < mesh.faces.size(); ++f)
    for (int c = 0; c < 3; ++c) {
      const int v = mesh.faces[f][c];
      const Vec6 here = mesh.corner(f, c);
      Eigen::Matrix<double, 6, 6> back = Eigen::Matrix<double, 6, 6>::Identity();
      if (mesh.has_shifts()) back = mesh.corner_map(f, c).inverse();
      for (int d = 1; d < 3; ++d) ring[v].push_back(back * (mesh.corner(f, (c + d) % 3) - here));
    }
  std::vector<Vec6> out(V);
  parallel_for(V, [&](std::size_t i) {
    const auto E = tangent_frame(mesh, mesh.vertices[i]);
    Eigen::Matrix4d S = Eigen::Matrix4d::Zero();
    for (const Vec6& d : ring[i]) {
      const Eigen::Vector4d w = metric_coords(mesh, E, d);
      S += w * w.transpose();
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(S);
    const Eigen::Matrix<double, 4, 2> T = es.eigenvectors().rightCols<2>();
    Eigen::Vector4d c = frame_coords(E, g.partial[i]);
    c -= T * (T.transpose() * c);
    out[i] = E * c;
  });
  return out;
}

Vec6 retract(const TriMesh& mesh, const Vec6& x) {
  Vec6 out;
  for (int f = 0; f < 2; ++f) out.segment<3>(3 * f) = embedding(mesh.factors[f]).normalize(x.segment<3>(3 * f));
  return out;
}

// -------------------------------------------------------------- diagnostics

std::vector<FaceKahler> kahler_measure(const TriMesh& mesh) {
  std::vector<FaceKahler> out(mesh.faces.size());
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const Vec6 P0 = mesh.corner(f, 0), P1 = mesh.corner(f, 1), P2 = mesh.corner(f, 2);
    double aa = 0, bb = 0, ab = 0, w[2];
    for (int k = 0; k < 2; ++k) {
      const FactorKind kind = mesh.factors[k];
      const FactorModel& m = model(kind);
      const Vec3 c = embedding(kind).normalize((P0 + P1 + P2).segment<3>(3 * k) / 3.0);
      const Vec3 a = m.project_tangent<double>(c, (P1 - P0).segment<3>(3 * k));
      const Vec3 b = m.project_tangent<double>(c, (P2 - P0).segment<3>(3 * k));
      aa += factor_metric(kind, a, a);
      bb += factor_metric(kind, b, b);
      ab += factor_metric(kind, a, b);
      w[k] = factor_metric(kind, m.j<double>(c, a), b);
    }
    const FaceGram g{aa, bb, ab};
    if (degenerate(g)) throw_degenerate(f);
    const double A2 = 2.0 * g.area();  // ω(a,b) over the area form on (a,b)
    out[f] = {(w[0] + w[1]) / A2, (-w[0] + w[1]) / A2};
  }
  return out;
}

KahlerSummary summarize(const std::vector<FaceKahler>& c) {
  KahlerSummary s;
  if (c.empty()) return s;
  s.min_C1 = s.max_C1 = c[0].C1;
  s.min_C2 = s.max_C2 = c[0].C2;
  for (const FaceKahler& k : c) {
    s.mean_abs_C1 += std::abs(k.C1);
    s.mean_abs_C2 += std::abs(k.C2);
    s.min_C1 = std::min(s.min_C1, k.C1);
    s.max_C1 = std::max(s.max_C1, k.C1);
    s.min_C2 = std::min(s.min_C2, k.C2);
    s.max_C2 = std::max(s.max_C2, k.C2);
  }
  s.mean_abs_C1 /= c.size();
  s.mean_abs_C2 /= c.size();
  return s;
}

std::vector<double> angle_defects(const TriMesh& mesh) {
  std::vector<double> d(mesh.vertices.size(), 2.0 * std::numbers::pi);
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const FaceGram g = checked_gram(mesh, f);
    const double s = std::sqrt(g.aa * g.bb - g.ab * g.ab);
    const auto& t = mesh.faces[f];
    d[t[0]] -= std::atan2(s, g.ab);
    d[t[1]] -= std::atan2(s, g.aa - g.ab);
    d[t[2]] -= std::atan2(s, g.bb - g.ab);
  }
  return d;
}

EulerReport euler_characteristic(const TriMesh& mesh) {
  validate_mesh(mesh, std::numeric_limits<double>::infinity());
  EulerReport r;
  r.V = static_cast<int>(mesh.vertices.size());
  r.F = static_cast<int>(mesh.faces.size());
  r.E = 3 * r.F / 2;
  r.chi = r.V - r.E + r.F;
  double s = 0;
  for (double x : angle_defects(mesh)) s += x;
  r.defect_chi = s / (2.0 * std::numbers::pi);
  return r;
}

EdgeStats edge_lengths(const TriMesh& mesh) {
  EdgeStats e{std::numeric_limits<double>::infinity(), 0, 0};
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const FaceGram g = face_gram(mesh, f);
    for (double l2 : {g.aa, g.bb, g.aa + g.bb - 2 * g.ab}) {
      const double l = std::sqrt(std::max(0.0, l2));
      e.min = std::min(e.min, l);
      e.max = std::max(e.max, l);
      e.mean += l;
    }
  }
  e.mean /= 3.0 * mesh.faces.size();
  return e;
}

double min_face_quality(const TriMesh& mesh) {
  double q = std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const FaceGram g = face_gram(mesh, f);
    const double a = std::sqrt(g.aa), b = std::sqrt(g.bb), c = std::sqrt(std::max(0.0, g.aa + g.bb - 2 * g.ab));
    const double A = g.area(), s = 0.5 * (a + b + c);
    q = std::min(q, s > 0 && a * b * c > 0 ? 4.0 * A * A / (s * a * b * c) : 0.0);
  }
  return q;
}

// --------------------------------------------------------------------- flow

void FlowConfig::validate() const {
  if (!(step_size > 0) || !(grad_tol > 0) || max_iters < 0 || !(armijo > 0 && armijo < 1) || !(min_step > 0) ||
      !(min_edge_ratio > 0) || !(min_quality > 0))
    throw std::invalid_argument("flow thresholds must be positive");
}

std::string to_string(FlowStatus s) {
  switch (s) {
    case FlowStatus::converged: return "converged";
    case FlowStatus::max_iters: return "max-iters";
    case FlowStatus::degenerated: return "degenerated";
    default: return "line-search-failed";
  }
}

FlowResult flow(TriMesh mesh, const FlowConfig& cfg) {
  cfg.validate();
  validate_mesh(mesh);
  FlowReport rep;
  if (any_hyperbolic(mesh))
    rep.notes.push_back("hyperbolic factor: face areas use edges projected to the tangent plane at the barycenter");
  if (cfg.projection == GradientProjection::normal)
    rep.notes.push_back("descent direction: area gradient normal to the discrete tangent planes");

  const double min_edge = cfg.min_edge_ratio * edge_lengths(mesh).mean;
  double A = area(mesh);
  double step = cfg.step_size;
  std::vector<Vec6> prev_x, prev_d;

  for (int it = 0;; ++it) {
    const AreaGradient g = area_gradient(mesh);
    const std::vector<Vec6> d = cfg.projection == GradientProjection::normal ? normal_gradient(mesh, g) : g.tangent;
    double dn = 0, d2 = 0;
    for (const Vec6& v : d) {
      const double n = tangent_norm(mesh, v);
      dn = std::max(dn, n);
      d2 += n * n;
    }
    const EdgeStats es = edge_lengths(mesh);
    const KahlerSummary ks = summarize(kahler_measure(mesh));
    FlowSample s{it, A, dn, g.sup_norm(), es.min, min_face_quality(mesh), ks.mean_abs_C1, ks.mean_abs_C2, 0.0};

    if (dn <= cfg.grad_tol) rep.status = FlowStatus::converged;
    else if (s.min_edge < min_edge || s.min_quality < cfg.min_quality) rep.status = FlowStatus::degenerated;
    else if (it >= cfg.max_iters) rep.status = FlowStatus::max_iters;
    if (dn <= cfg.grad_tol || s.min_edge < min_edge || s.min_quality < cfg.min_quality || it >= cfg.max_iters) {
      rep.trajectory.push_back(s);
      break;
    }

    // Barzilai-Borwein trial step, safeguarded by Armijo backtracking.
    if (cfg.step == StepPolicy::backtracking && !prev_x.empty()) {
      double ss = 0, sy = 0;
      for (std::size_t i = 0; i < d.size(); ++i) {
        const Vec6 dx = mesh.vertices[i] - prev_x[i], dy = d[i] - prev_d[i];
        ss += dx.squaredNorm();
        sy += dx.dot(dy);
      }
      step = sy > 0 ? ss / sy : 2.0 * step;
    }
    if (cfg.step == StepPolicy::fixed) step = cfg.step_size;

    TriMesh trial = mesh;
    double At = 0;
    bool accepted = false;
    while (step >= cfg.min_step) {
      bool ok = true;
      try {
        for (std::size_t i = 0; i < d.size(); ++i) trial.vertices[i] = retract(mesh, mesh.vertices[i] - step * d[i]);
        At = area(trial);
      } catch (const std::exception&) {
        ok = false;
      }
      if (ok && (cfg.step == StepPolicy::fixed || At <= A - cfg.armijo * step * d2)) {
        accepted = true;
        break;
      }
      if (cfg.step == StepPolicy::fixed) break;
      step *= 0.5;
    }
    if (!accepted) {
      rep.status = FlowStatus::line_search_failed;
      rep.trajectory.push_back(s);
      break;
    }
    s.step = step;
    rep.trajectory.push_back(s);
    if (At > A) rep.area_monotone = false;
    prev_x = mesh.vertices;
    prev_d = d;
    mesh = std::move(trial);
    A = At;
    rep.max_quadric_violation = std::max(rep.max_quadric_violation, quadric_violation(mesh));
  }
  return {std::move(mesh), std::move(rep)};
}

void write_trajectory_csv(std::ostream& out, const FlowReport& report) {
  const auto old = out.precision(17);
  out << "iteration,area,grad_norm,full_grad_norm,min_edge,min_quality,mean_abs_C1,mean_abs_C2,step\n";
  for (const FlowSample& s : report.trajectory)
    out << s.iteration << ',' << s.area << ',' << s.grad_norm << ',' << s.full_grad_norm << ',' << s.min_edge << ','
        << s.min_quality << ',' << s.mean_abs_C1 << ',' << s.mean_abs_C2 << ',' << s.step << '\n';
  out.precision(old);
}

// ------------------------------------------------------------------- meshes

Mat3 boost(double d) {
  Mat3 B = Mat3::Identity();
  B(0, 0) = B(1, 1) = std::cosh(d);
  B(0, 1) = B(1, 0) = std::sinh(d);
  return B;
}

TriMesh icosphere(int subdivisions) {
  if (subdivisions < 0) throw std::invalid_argument("subdivisions must be non-negative");
  const double t = (1 + std::sqrt(5.0)) / 2;
  std::vector<Vec3> V = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                         {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (Vec3& v : V) v.normalize();
  std::vector<TriMesh::Face> F = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                  {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                  {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                  {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      V.push_back((V[a] + V[b]).normalized());
      return mid[key] = static_cast<int>(V.size()) - 1;
    };
    std::vector<TriMesh::Face> G;
    G.reserve(4 * F.size());
    for (const auto& f : F) {
      const int ab = midpoint(f[0], f[1]), bc = midpoint(f[1], f[2]), ca = midpoint(f[2], f[0]);
      G.push_back({f[0], ab, ca});
      G.push_back({f[1], bc, ab});
      G.push_back({f[2], ca, bc});
      G.push_back({ab, bc, ca});
    }
    F = std::move(G);
  }
  TriMesh m;
  for (auto& f : F)
    if (V[f[0]].dot((V[f[1]] - V[f[0]]).cross(V[f[2]] - V[f[0]])) < 0) std::swap(f[1], f[2]);
  m.faces = std::move(F);
  for (const Vec3& v : V) {
    Vec6 x;
    x << v, v;
    m.vertices.push_back(x);
  }
  return m;
}

TriMesh slice_icosphere(int subdivisions) {
  TriMesh m = icosphere(subdivisions);
  for (Vec6& v : m.vertices) v.tail<3>() = Vec3(0, 0, 1);
  return m;
}

TriMesh diagonal_icosphere(int subdivisions) { return icosphere(subdivisions); }

namespace {

// n₁×n₂ quad grid split along one diagonal; wrap flags tell where a corner
// crossed the seam.
TriMesh torus_topology(int n1, int n2, bool shifts) {
  if (n1 < 3 || n2 < 3) throw std::invalid_argument("torus meshes need at least 3 nodes per direction");
  TriMesh m;
  m.vertices.resize(static_cast<std::size_t>(n1) * n2);
  auto id = [&](int i, int j) { return (i % n1) * n2 + (j % n2); };
  auto sh = [&](int i, int j) { return TriMesh::Shift{i / n1, j / n2}; };
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j) {
      m.faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      m.faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
      if (shifts) {
        m.shifts.push_back({sh(i, j), sh(i + 1, j), sh(i + 1, j + 1)});
        m.shifts.push_back({sh(i, j), sh(i + 1, j + 1), sh(i, j + 1)});
      }
    }
  return m;
}

}  // namespace

TriMesh great_circle_torus(int n1, int n2) {
  TriMesh m = torus_topology(n1, n2, false);
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j) {
      const double a = 2 * std::numbers::pi * i / n1, b = 2 * std::numbers::pi * j / n2;
      m.vertices[i * n2 + j] << std::cos(a), std::sin(a), 0, std::cos(b), std::sin(b), 0;
    }
  return m;
}

TriMesh geodesic_torus_h2(int n1, int n2, double l1, double l2) {
  if (!(l1 > 0) || !(l2 > 0)) throw std::invalid_argument("geodesic lengths must be positive");
  TriMesh m = torus_topology(n1, n2, true);
  m.factors = {FactorKind::hyperbolic, FactorKind::hyperbolic};
  m.decks = {DeckGenerator{boost(l1), Mat3::Identity()}, DeckGenerator{Mat3::Identity(), boost(l2)}};
  const Vec3 o(1, 0, 0);
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j) m.vertices[i * n2 + j] << boost(l1 * i / n1) * o, boost(l2 * j / n2) * o;
  return m;
}

TriMesh hyperbolic_icosphere(int subdivisions, double scale) {
  TriMesh m = icosphere(subdivisions);
  m.factors = {FactorKind::hyperbolic, FactorKind::hyperbolic};
  auto lift = [](double a, double b) { return Vec3(std::sqrt(1 + a * a + b * b), a, b); };
  for (Vec6& v : m.vertices) {
    const Vec3 u = v.head<3>() * scale;
    v << lift(u(0), u(1)), lift(u(1), u(2));
  }
  return m;
}

TriMesh perturb(const TriMesh& mesh, double amplitude, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  TriMesh out = mesh;
  for (Vec6& v : out.vertices) {
    Eigen::Vector4d w;
    for (int i = 0; i < 4; ++i) w(i) = normal(rng);
    v = retract(mesh, v + amplitude * (tangent_frame(mesh, v) * w));
  }
  return out;
}

}  // namespace prodsurf

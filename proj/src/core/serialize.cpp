#include "core/serialize.hpp"

#include <fstream>

namespace plgl {

Json report_to_json(const ExperimentReport& rep) {
  Json j;
  j["name"] = rep.name;
  j["algebra"] = rep.algebra;
  j["seed"] = rep.seed;
  j["samples"] = rep.samples;
  j["radius"] = rep.radius;
  Json checks = Json::array();
  for (const auto& c : rep.checks) {
    Json jc;
    jc["id"] = c.id;
    jc["max_residual"] = c.max_residual;
    jc["mean_residual"] = c.mean_residual;
    jc["tolerance"] = c.tolerance;
    jc["pass"] = c.pass;
    checks.push_back(jc);
  }
  j["checks"] = checks;
  Json num;
  num["fd_step"] = rep.numerics.fd_step;
  num["rk4_steps"] = rep.numerics.rk4_steps;
  num["quad_nodes"] = rep.numerics.quad_nodes;
  num["newton_tol"] = rep.numerics.newton_tol;
  j["numerics"] = num;
  j["pass"] = rep.pass();
  return j;
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw InputError("malformed JSON in '" + path + "': " + e.what());
  }
  return j;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write file '" + path + "'");
  out << content;
}

namespace {

Mat json_to_matrix(const Json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw InputError(what + ": expected a matrix");
  int rows = static_cast<int>(j.size());
  int cols = static_cast<int>(j[0].size());
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (static_cast<int>(j[i].size()) != cols)
      throw InputError(what + ": ragged matrix rows");
    for (int k = 0; k < cols; ++k) {
      if (!j[i][k].is_number()) throw InputError(what + ": non-numeric entry");
      m(i, k) = j[i][k].get<double>();
    }
  }
  return m;
}

void require_keys(const Json& j, const std::vector<std::string>& keys,
                  const std::string& what) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const auto& k : keys)
      if (it.key() == k) known = true;
    if (!known) throw InputError(what + ": unknown key '" + it.key() + "'");
  }
}

}  // namespace

AlgebraFile load_algebra_file(const std::string& path) {
  Json j = load_json_file(path);
  require_keys(j, {"dim", "brackets", "metric", "r", "g_indices", "h_indices"},
               "algebra spec");
  for (const auto& k : {"dim", "brackets", "metric", "g_indices", "h_indices"})
    if (!j.contains(k)) throw InputError(std::string("algebra spec: missing '") + k + "'");

  int D = j["dim"].get<int>();
  if (D <= 0 || D % 2 != 0) throw InputError("algebra spec: dim must be positive even");
  const int n = D / 2;

  std::vector<int> gi = j["g_indices"].get<std::vector<int>>();
  std::vector<int> hi = j["h_indices"].get<std::vector<int>>();
  if (static_cast<int>(gi.size()) != n || static_cast<int>(hi.size()) != n)
    throw InputError("algebra spec: index sets must each select half the basis");
  std::vector<int> perm(D, -1);  // old index -> canonical index
  std::vector<char> seen(D, 0);
  for (int a = 0; a < n; ++a) {
    if (gi[a] < 0 || gi[a] >= D || seen[gi[a]]) throw InputError("algebra spec: bad g_indices");
    seen[gi[a]] = 1;
    perm[gi[a]] = a;
  }
  for (int a = 0; a < n; ++a) {
    if (hi[a] < 0 || hi[a] >= D || seen[hi[a]]) throw InputError("algebra spec: bad h_indices");
    seen[hi[a]] = 1;
    perm[hi[a]] = n + a;
  }

  StructureConstants f(D);
  for (const auto& row : j["brackets"]) {
    if (!row.is_array() || row.size() != 4)
      throw InputError("algebra spec: brackets entries must be [a,b,c,value]");
    int a = row[0].get<int>(), b = row[1].get<int>(), c = row[2].get<int>();
    double v = row[3].get<double>();
    if (a < 0 || b < 0 || c < 0 || a >= D || b >= D || c >= D)
      throw InputError("algebra spec: bracket index out of range");
    f.set_bracket(perm[a], perm[b], perm[c], v);
  }

  Mat metric_raw = json_to_matrix(j["metric"], "algebra spec metric");
  if (metric_raw.rows() != D || metric_raw.cols() != D)
    throw InputError("algebra spec: metric has wrong size");
  Mat metric(D, D);
  for (int a = 0; a < D; ++a)
    for (int b = 0; b < D; ++b) metric(perm[a], perm[b]) = metric_raw(a, b);

  Mat r = Mat::Zero(n, n);
  if (j.contains("r")) {
    r = json_to_matrix(j["r"], "algebra spec r");
    if (r.rows() != n || r.cols() != n)
      throw InputError("algebra spec: r must be n x n on the g basis");
  }

  AlgebraFile out;
  out.triple.d.dim = D;
  out.triple.d.f = f;
  out.triple.metric.matrix = metric;
  out.triple.g_indices.resize(n);
  out.triple.h_indices.resize(n);
  for (int i = 0; i < n; ++i) {
    out.triple.g_indices[i] = i;
    out.triple.h_indices[i] = n + i;
  }
  out.triple.validate();

  LieAlgebra g;
  g.dim = n;
  g.f = StructureConstants(n);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = 0; c < n; ++c)
        if (f(a, b, c) != 0.0) g.f.set_bracket(a, b, c, f(a, b, c));
  RMatrix rm;
  rm.r = r;
  out.bialg = cobracket_from_r(g, rm);
  return out;
}

Json algebra_to_json(const LieBialgebra& bialg, const ManinTriple& triple) {
  Json j;
  const int D = triple.d.dim;
  j["dim"] = D;
  Json brackets = Json::array();
  for (int a = 0; a < D; ++a)
    for (int b = a + 1; b < D; ++b)
      for (int c = 0; c < D; ++c)
        if (triple.d.f(a, b, c) != 0.0)
          brackets.push_back(Json::array({a, b, c, triple.d.f(a, b, c)}));
  j["brackets"] = brackets;
  Json metric = Json::array();
  for (int a = 0; a < D; ++a) {
    Json row = Json::array();
    for (int b = 0; b < D; ++b) row.push_back(triple.metric.matrix(a, b));
    metric.push_back(row);
  }
  j["metric"] = metric;
  Json r = Json::array();
  const int n = bialg.dim();
  for (int a = 0; a < n; ++a) {
    Json row = Json::array();
    for (int b = 0; b < n; ++b) row.push_back(bialg.r.r(a, b));
    r.push_back(row);
  }
  j["r"] = r;
  j["g_indices"] = triple.g_indices;
  j["h_indices"] = triple.h_indices;
  return j;
}

MatrixRep load_rep_file(const std::string& path, int expected_dim) {
  Json j = load_json_file(path);
  require_keys(j, {"N", "rho"}, "rep file");
  if (!j.contains("N") || !j.contains("rho")) throw InputError("rep file: missing keys");
  int N = j["N"].get<int>();
  if (N <= 0) throw InputError("rep file: N must be positive");
  const auto& rho = j["rho"];
  if (!rho.is_array() || (expected_dim > 0 && static_cast<int>(rho.size()) != expected_dim))
    throw InputError("rep file: need one matrix per double basis element");

  std::vector<Mat> basis;
  bool upper_h = true;
  const int dim = static_cast<int>(rho.size());
  for (int i = 0; i < dim; ++i) {
    const auto& jm = rho[i];
    if (static_cast<int>(jm.size()) != N) throw InputError("rep file: matrix size mismatch");
    CMat m(N, N);
    for (int a = 0; a < N; ++a) {
      if (static_cast<int>(jm[a].size()) != N)
        throw InputError("rep file: matrix size mismatch");
      for (int b = 0; b < N; ++b) {
        const auto& e = jm[a][b];
        if (!e.is_array() || e.size() != 2)
          throw InputError("rep file: entries must be [re, im] pairs");
        m(a, b) = std::complex<double>(e[0].get<double>(), e[1].get<double>());
      }
    }
    if (i >= dim / 2) {
      // the QR factorization path needs H upper triangular in the complex
      // picture
      for (int a = 0; a < N; ++a)
        for (int b = 0; b < a; ++b)
          if (std::abs(m(a, b)) > 1e-12) upper_h = false;
      for (int a = 0; a < N; ++a)
        if (std::abs(m(a, a).imag()) > 1e-12) upper_h = false;
    } else {
      // ...and G compact (anti-Hermitian generators)
      if ((m + m.adjoint()).norm() > 1e-12) upper_h = false;
    }
    basis.push_back(realify(m));
  }
  return MatrixRep(std::move(basis), upper_h);
}

Json rep_to_json(const MatrixRep& rep) {
  if (!rep.complex_picture())
    throw InputError("rep export needs the complex picture");
  Json j;
  const int Nc = rep.N() / 2;
  j["N"] = Nc;
  Json rho = Json::array();
  for (int i = 0; i < rep.dim(); ++i) {
    CMat m = complexify(rep.rho(i));
    Json jm = Json::array();
    for (int a = 0; a < Nc; ++a) {
      Json row = Json::array();
      for (int b = 0; b < Nc; ++b)
        row.push_back(Json::array({m(a, b).real(), m(a, b).imag()}));
      jm.push_back(row);
    }
    rho.push_back(jm);
  }
  j["rho"] = rho;
  return j;
}

ContextPtr load_context(const std::string& algebra_path, const std::string& rep_path,
                        double chart_radius) {
  AlgebraFile af = load_algebra_file(algebra_path);
  MatrixRep rep = load_rep_file(rep_path, af.triple.d.dim);
  double hom = rep.homomorphism_residual(af.triple.d.f);
  if (hom > kAlgebraTol)
    throw InputError("rep file: not a homomorphism for the algebra spec (residual " +
                     std::to_string(hom) + ")");
  return std::make_shared<TripleContext>(af.bialg, af.triple, std::move(rep),
                                         algebra_path, chart_radius);
}

}  // namespace plgl

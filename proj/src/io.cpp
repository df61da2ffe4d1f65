#include "freespec/io.hpp"

#include <fstream>
#include <sstream>

namespace freespec::io {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& why) { throw ParseError(path + ": " + why); }

const Json& field(const Json& j, const char* key, const std::string& path) {
  if (!j.is_object()) fail(path.empty() ? "<root>" : path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(path.empty() ? key : path + "." + key, "missing field");
  return *it;
}

std::string index(const std::string& path, size_t i) { return path + "[" + std::to_string(i) + "]"; }

double number(const Json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

int integer(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

const Json& array(const Json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array");
  return j;
}

template <class F>
auto rethrow_as(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    fail(path, e.what());
  }
}

std::vector<HermitianMatrix> hermitian_list(const Json& j, const std::string& path) {
  std::vector<HermitianMatrix> out;
  for (size_t i = 0; i < array(j, path).size(); ++i) out.push_back(hermitian_from_json(j[i], index(path, i)));
  return out;
}

std::vector<RVector> vector_list(const Json& j, const std::string& path, int d) {
  std::vector<RVector> out;
  for (size_t i = 0; i < array(j, path).size(); ++i) {
    out.push_back(vector_from_json(j[i], index(path, i)));
    if (out.back().size() != d) fail(index(path, i), "expected length " + std::to_string(d));
  }
  return out;
}

Json list(const std::vector<HermitianMatrix>& ms) {
  Json a = Json::array();
  for (const auto& m : ms) a.push_back(to_json(m));
  return a;
}

int line_of(const std::string& text, size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
}

std::string checked(const Json& cert, const char* key) {
  const Json& k = field(cert, key, "");
  if (!k.is_string()) fail(key, "expected a string");
  return k.get<std::string>();
}

}  // namespace

Json to_json(const CMatrix& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int k = 0; k < m.cols(); ++k) row.push_back(Json::array({m(i, k).real(), m(i, k).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const HermitianMatrix& m) { return to_json(m.matrix()); }

Json to_json(const RVector& v) {
  Json a = Json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Json to_json(const PolyhedralCone& c) {
  Json gens = Json::array(), facets = Json::array();
  for (const auto& g : c.generators()) gens.push_back(to_json(g));
  for (const auto& f : c.facets()) facets.push_back(to_json(f));
  return Json{{"d", c.dim()}, {"unit", to_json(c.unit())}, {"generators", gens}, {"facets", facets}};
}

Json to_json(const LinearPencil& p) {
  return Json{{"d", p.d()}, {"r", p.r()}, {"unit", to_json(p.unit())}, {"matrices", list(p.matrices())}};
}

Json to_json(const MatrixTuple& a) { return Json{{"d", a.d()}, {"s", a.s()}, {"entries", list(a.entries())}}; }

CMatrix complex_matrix_from_json(const Json& j, const std::string& path) {
  array(j, path);
  const size_t rows = j.size();
  size_t cols = 0;
  for (size_t i = 0; i < rows; ++i) {
    const std::string rp = index(path, i);
    if (array(j[i], rp).size() != (i == 0 ? j[0].size() : cols)) fail(rp, "rows differ in length");
    cols = j[i].size();
  }
  CMatrix m(rows, cols);
  for (size_t i = 0; i < rows; ++i)
    for (size_t k = 0; k < cols; ++k) {
      const std::string ep = index(index(path, i), k);
      const Json& e = j[i][k];
      if (!e.is_array() || e.size() != 2) fail(ep, "expected [re, im]");
      m(i, k) = Complex(number(e[0], ep + "[0]"), number(e[1], ep + "[1]"));
    }
  return m;
}

HermitianMatrix hermitian_from_json(const Json& j, const std::string& path) {
  const CMatrix m = complex_matrix_from_json(j, path);
  if (m.rows() != m.cols()) fail(path, "matrix is not square");
  if (m.rows() == 0) fail(path, "matrix is empty");
  return rethrow_as(path, [&] { return HermitianMatrix(m); });
}

RVector vector_from_json(const Json& j, const std::string& path) {
  RVector v(array(j, path).size());
  for (size_t i = 0; i < j.size(); ++i) v(i) = number(j[i], index(path, i));
  return v;
}

PolyhedralCone cone_from_json(const Json& j) {
  const int d = integer(field(j, "d", ""), "d");
  if (d < 1) fail("d", "must be positive");
  RVector u = vector_from_json(field(j, "unit", ""), "unit");
  if (u.size() != d) fail("unit", "expected length " + std::to_string(d));
  auto gens = vector_list(field(j, "generators", ""), "generators", d);
  if (j.contains("facets")) {
    auto facets = vector_list(j["facets"], "facets", d);
    return rethrow_as("facets", [&] {
      return PolyhedralCone::from_description(std::move(gens), std::move(facets), std::move(u));
    });
  }
  return rethrow_as("generators", [&] { return PolyhedralCone::from_generators(std::move(gens), std::move(u)); });
}

LinearPencil pencil_from_json(const Json& j) {
  const int d = integer(field(j, "d", ""), "d");
  const int r = integer(field(j, "r", ""), "r");
  RVector u = vector_from_json(field(j, "unit", ""), "unit");
  if (u.size() != d) fail("unit", "expected length " + std::to_string(d));
  auto ms = hermitian_list(field(j, "matrices", ""), "matrices");
  if (static_cast<int>(ms.size()) != d) fail("matrices", "expected " + std::to_string(d) + " matrices");
  for (size_t i = 0; i < ms.size(); ++i)
    if (ms[i].dim() != r) fail(index("matrices", i), "expected size " + std::to_string(r));
  return rethrow_as("matrices", [&] { return LinearPencil(std::move(ms), std::move(u)); });
}

MatrixTuple tuple_from_json(const Json& j) {
  const int d = integer(field(j, "d", ""), "d");
  const int s = integer(field(j, "s", ""), "s");
  auto es = hermitian_list(field(j, "entries", ""), "entries");
  if (static_cast<int>(es.size()) != d) fail("entries", "expected " + std::to_string(d) + " entries");
  for (size_t i = 0; i < es.size(); ++i)
    if (es[i].dim() != s) fail(index("entries", i), "expected size " + std::to_string(s));
  return rethrow_as("entries", [&] { return MatrixTuple(std::move(es)); });
}

Json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const size_t off = e.byte > 0 ? e.byte - 1 : 0;
    const size_t bol = text.rfind('\n', off == 0 ? 0 : off - 1);
    const size_t col = off - (bol == std::string::npos ? 0 : bol + 1) + 1;
    std::string what = e.what();
    if (auto p = what.find("error: "); p != std::string::npos) what = what.substr(p + 7);
    throw ParseError(source + ":" + std::to_string(line_of(text, off)) + ":" + std::to_string(col) +
                     ": malformed JSON: " + what);
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str(), path);
}

const char* kind_name(const Input& in) {
  switch (in.index()) {
    case 0: return "cone";
    case 1: return "pencil";
    case 2: return "tuple";
    default: return "matrix";
  }
}

Input parse_input_text(const std::string& text, const std::string& source) {
  const Json j = parse_json_text(text, source);
  try {
    if (j.is_array()) return hermitian_from_json(j, "matrix");
    if (!j.is_object()) fail("<root>", "expected an object or a matrix");
    if (j.contains("generators")) return cone_from_json(j);
    if (j.contains("matrices")) return pencil_from_json(j);
    if (j.contains("entries")) return tuple_from_json(j);
    fail("<root>", "cannot tell the kind: need \"generators\", \"matrices\" or \"entries\"");
  } catch (const ParseError& e) {
    // Line of the top-level field named at the start of the path.
    const std::string msg = e.what();
    const std::string key = msg.substr(0, msg.find_first_of(".[:"));
    size_t off = text.find("\"" + key + "\"");
    if (off == std::string::npos) off = 0;
    throw ParseError(source + ":" + std::to_string(line_of(text, off)) + ": " + msg);
  }
}

Input parse_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_input_text(ss.str(), path);
}

Json min_membership_certificate(const PolyhedralCone& c, const MatrixTuple& a,
                                const MinMembershipCertificate& cert) {
  return Json{{"kind", "min_membership"}, {"cone", to_json(c)}, {"tuple", to_json(a)},
              {"weights", list(cert.weights)}};
}

Json separator_certificate(const PolyhedralCone& c, const MatrixTuple& a, const SeparationFunctional& phi) {
  return Json{{"kind", "separator"}, {"cone", to_json(c)}, {"tuple", to_json(a)}, {"n", list(phi.n)}};
}

Json relaxation_certificate(const LinearPencil& src, const LinearPencil& tgt, const RelaxationCertificate& cert) {
  Json k = Json::array();
  for (const auto& v : cert.kraus) k.push_back(to_json(v));
  return Json{{"kind", "relaxation"}, {"source", to_json(src)}, {"target", to_json(tgt)}, {"kraus", k}};
}

Json relaxation_infeasible_certificate(const LinearPencil& src, const LinearPencil& tgt,
                                       const sdp::FarkasCertificate& farkas) {
  return Json{{"kind", "relaxation_infeasible"}, {"source", to_json(src)}, {"target", to_json(tgt)},
              {"y", farkas.y}};
}

Json essential_boundary_certificate(const std::array<HermitianMatrix, 4>& a, const HermitianMatrix& m3,
                                    const HermitianMatrix& d, const HermitianMatrix& s, double eps) {
  return Json{{"kind", "essential_boundary"},
              {"components", list({a.begin(), a.end()})},
              {"m3", to_json(m3)},
              {"d", to_json(d)},
              {"s", to_json(s)},
              {"eps", eps}};
}

Json sandwich_certificate(const PolyhedralCone& c, double nu, const RVector& h, const PolyhedralCone& simplex) {
  return Json{{"kind", "sandwich"}, {"cone", to_json(c)}, {"nu", nu}, {"normal", to_json(h)},
              {"simplex", to_json(simplex)}};
}

Json free_witness_certificate(const PolyhedralCone& src, const LinearPencil& tgt, const FreeWitness& w) {
  return Json{{"kind", "free_witness"}, {"source", to_json(src)}, {"target", to_json(tgt)},
              {"tuple", to_json(w.tuple)}};
}

Json sdp_certificate(const sdp::SdpProblem& p, const sdp::SdpOutcome& outcome) {
  std::ostringstream os;
  sdp::write_sdpa(os, p);
  Json j{{"kind", "sdp"}, {"problem", os.str()}, {"status", sdp::to_string(outcome.status)}};
  if (outcome.primal) j["primal"] = list(*outcome.primal);
  if (outcome.dual) j["dual"] = *outcome.dual;
  if (outcome.dual_certificate) j["farkas"] = outcome.dual_certificate->y;
  return j;
}

CertificateCheck verify_certificate(const Json& cert) {
  CertificateCheck out;
  out.kind = checked(cert, "kind");
  const std::string& k = out.kind;
  if (k == "min_membership") {
    const PolyhedralCone c = cone_from_json(field(cert, "cone", ""));
    const MatrixTuple a = tuple_from_json(field(cert, "tuple", ""));
    const MinMembershipCertificate mc{hermitian_list(field(cert, "weights", ""), "weights"), 0.0};
    if (mc.weights.size() != c.generators().size()) fail("weights", "one weight per generator expected");
    out.ok = check_min_certificate(c, a, mc, &out.residual);
    out.detail = out.ok ? "decomposition verified" : "decomposition rejected";
  } else if (k == "separator") {
    const PolyhedralCone c = cone_from_json(field(cert, "cone", ""));
    const MatrixTuple a = tuple_from_json(field(cert, "tuple", ""));
    SeparationFunctional phi{hermitian_list(field(cert, "n", ""), "n"), 0.0};
    if (static_cast<int>(phi.n.size()) != c.dim()) fail("n", "one matrix per coordinate expected");
    const double pos = min_positivity(phi, c);
    const double val = phi.evaluate(a);
    out.residual = std::max(0.0, -pos);
    out.ok = pos >= -1e-9 && val < 0.0;
    out.detail = "phi(query) = " + std::to_string(val) + ", positivity margin = " + std::to_string(pos);
  } else if (k == "relaxation") {
    const LinearPencil src = pencil_from_json(field(cert, "source", ""));
    const LinearPencil tgt = pencil_from_json(field(cert, "target", ""));
    std::vector<CMatrix> kraus;
    const Json& kj = array(field(cert, "kraus", ""), "kraus");
    for (size_t i = 0; i < kj.size(); ++i) {
      kraus.push_back(complex_matrix_from_json(kj[i], index("kraus", i)));
      if (kraus.back().rows() != src.r() || kraus.back().cols() != tgt.r())
        fail(index("kraus", i), "expected an r x t matrix");
    }
    out.residual = kraus_residual(src, tgt, kraus);
    out.ok = out.residual <= 1e-6;
    out.detail = "Kraus residual " + std::to_string(out.residual);
  } else if (k == "relaxation_infeasible") {
    const LinearPencil src = pencil_from_json(field(cert, "source", ""));
    const LinearPencil tgt = pencil_from_json(field(cert, "target", ""));
    const Json& yj = array(field(cert, "y", ""), "y");
    std::vector<double> y;
    for (size_t i = 0; i < yj.size(); ++i) y.push_back(number(yj[i], index("y", i)));
    const sdp::SdpProblem p = relaxation_problem(src, tgt);
    if (static_cast<int>(y.size()) != p.num_constraints()) fail("y", "wrong number of multipliers");
    double by = 0.0, lmax = 0.0;
    out.ok = sdp::farkas_valid(p, y, &by, &lmax);
    out.residual = std::max(0.0, lmax);
    out.detail = "b.y = " + std::to_string(by) + ", max eigenvalue = " + std::to_string(lmax);
  } else if (k == "essential_boundary") {
    const auto comps = hermitian_list(field(cert, "components", ""), "components");
    if (comps.size() != 4) fail("components", "expected four matrices");
    const std::array<HermitianMatrix, 4> a = {comps[0], comps[1], comps[2], comps[3]};
    const HermitianMatrix m3 = hermitian_from_json(field(cert, "m3", ""), "m3");
    const HermitianMatrix d = hermitian_from_json(field(cert, "d", ""), "d");
    const HermitianMatrix s = hermitian_from_json(field(cert, "s", ""), "s");
    const double eps = number(field(cert, "eps", ""), "eps");
    out.ok = check_essential_certificate(a, m3, d, s, eps, 1e-6, &out.detail);
    if (out.ok) out.detail = "functional verified";
  } else if (k == "sandwich") {
    const PolyhedralCone c = cone_from_json(field(cert, "cone", ""));
    const PolyhedralCone s = cone_from_json(field(cert, "simplex", ""));
    const double nu = number(field(cert, "nu", ""), "nu");
    const RVector h = vector_from_json(field(cert, "normal", ""), "normal");
    out.ok = is_simplex(s) && sandwich_holds(c, nu, h, s);
    out.detail = out.ok ? "simplex sandwiched" : "sandwich condition fails";
  } else if (k == "free_witness") {
    const PolyhedralCone src = cone_from_json(field(cert, "source", ""));
    const LinearPencil tgt = pencil_from_json(field(cert, "target", ""));
    const MatrixTuple a = tuple_from_json(field(cert, "tuple", ""));
    const MaxMembershipResult inside = max_membership(src, a);
    const MembershipResult outside = membership(tgt, a);
    out.residual = outside.margin;
    out.ok = inside.kind != Membership::Outside && outside.kind == Membership::Outside;
    out.detail = "source margin " + std::to_string(inside.margin) + ", target margin " +
                 std::to_string(outside.margin);
  } else if (k == "sdp") {
    std::istringstream is(checked(cert, "problem"));
    const sdp::SdpProblem p = rethrow_as("problem", [&] { return sdp::read_sdpa(is); });
    sdp::SdpOutcome o;
    const std::string st = checked(cert, "status");
    if (st == "Feasible") o.status = sdp::Status::Feasible;
    else if (st == "Optimal") o.status = sdp::Status::Optimal;
    else if (st == "Infeasible") o.status = sdp::Status::Infeasible;
    else fail("status", "no certificate for status " + st);
    if (cert.contains("primal")) o.primal = hermitian_list(cert["primal"], "primal");
    auto doubles = [](const Json& j, const char* key) {
      const RVector v = vector_from_json(j, key);
      return std::vector<double>(v.data(), v.data() + v.size());
    };
    if (cert.contains("dual")) o.dual = doubles(cert["dual"], "dual");
    if (cert.contains("farkas")) o.dual_certificate = sdp::FarkasCertificate{doubles(cert["farkas"], "farkas")};
    const sdp::VerifyReport rep = rethrow_as("primal", [&] { return sdp::verify(o, p); });
    out.ok = rep.ok;
    out.residual = rep.max_residual;
    out.detail = rep.detail;
  } else {
    fail("kind", "unknown certificate kind \"" + k + "\"");
  }
  return out;
}

}  // namespace freespec::io

#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "expr.hpp"
#include "freespec/containment.hpp"
#include "freespec/io.hpp"
#include "freespec/opsys.hpp"

namespace freespec::cli {

namespace {

using io::Json;

constexpr double kPi = 3.14159265358979323846;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::string output = "human";
  std::uint64_t seed = 1;
  double tol = 1e-7;
  std::string certificate_out;
  std::string dump_sdp;
};

struct Report {
  Json body = Json::object();
  int code = 0;
  std::vector<Json> certificates;
};

double parse_number(const std::string& flag, const std::string& text) {
  try {
    return parse_expression(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(flag + ": " + e.what());
  }
}

RVector parse_vector(const std::string& flag, const std::string& text) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) vals.push_back(parse_number(flag, part));
  if (vals.empty()) throw UsageError(flag + ": expected comma-separated numbers");
  return Eigen::Map<RVector>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

PolyhedralCone load_cone(const std::string& spec) {
  if (spec == "square") return square_cone();
  io::Input in = io::parse_input(spec);
  if (auto* c = std::get_if<PolyhedralCone>(&in)) return *c;
  throw UsageError(spec + ": expected a cone, found a " + io::kind_name(in));
}

// Cones become their diagonal pencils.
LinearPencil load_pencil(const std::string& spec, std::optional<double> alpha) {
  if (spec == "calpha") return calpha_pencil(alpha.value_or(kPi / 4));
  if (spec == "circular") return circular_pencil();
  if (spec == "square") return diagonal_pencil(square_cone());
  io::Input in = io::parse_input(spec);
  if (auto* p = std::get_if<LinearPencil>(&in)) return *p;
  if (auto* c = std::get_if<PolyhedralCone>(&in)) return diagonal_pencil(*c);
  throw UsageError(spec + ": expected a pencil, found a " + io::kind_name(in));
}

MatrixTuple load_tuple(const std::string& spec) {
  io::Input in = io::parse_input(spec);
  if (auto* t = std::get_if<MatrixTuple>(&in)) return *t;
  throw UsageError(spec + ": expected a tuple, found a " + io::kind_name(in));
}

HermitianMatrix load_matrix(const std::string& spec) {
  io::Input in = io::parse_input(spec);
  if (auto* m = std::get_if<HermitianMatrix>(&in)) return *m;
  throw UsageError(spec + ": expected a matrix, found a " + io::kind_name(in));
}

void dump_sdp(const Globals& g, const sdp::SdpProblem& p) {
  if (g.dump_sdp.empty()) return;
  std::ofstream f(g.dump_sdp);
  if (!f) throw UsageError("--dump-sdp: cannot write " + g.dump_sdp);
  sdp::write_sdpa(f, p);
}

sdp::SolveOptions solve_options(const Globals& g) {
  sdp::SolveOptions o;
  o.tol = g.tol;
  return o;
}

Json relaxation_json(const RelaxationResult& r) {
  Json j{{"status", to_string(r.status)}, {"message", r.message}};
  if (r.certificate) {
    j["kraus_operators"] = r.certificate->kraus.size();
    j["residual"] = r.certificate->residual;
  }
  if (r.farkas) j["farkas_max_eigenvalue"] = r.farkas->max_eigenvalue;
  return j;
}

void add_relaxation_certificate(Report& rep, const LinearPencil& src, const LinearPencil& tgt,
                                const RelaxationResult& r) {
  if (r.status == RelaxationStatus::Feasible && r.certificate)
    rep.certificates.push_back(io::relaxation_certificate(src, tgt, *r.certificate));
  if (r.status == RelaxationStatus::Infeasible && r.farkas)
    rep.certificates.push_back(io::relaxation_infeasible_certificate(src, tgt, *r.farkas));
}

void human(std::ostream& out, const Json& j, const std::string& prefix) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (it->is_object()) human(out, *it, key);
    else if (it->is_string()) out << key << ": " << it->get<std::string>() << "\n";
    else if (it->is_number_float()) out << key << ": " << it->get<double>() << "\n";
    else out << key << ": " << it->dump() << "\n";
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Inclusion tests for polyhedral cones and free spectrahedra", "freespec"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--output", g.output, "Report format")->check(CLI::IsMember({"human", "json"}));
  app.add_option("--seed", g.seed, "Seed for randomized steps");
  app.add_option("--tol", g.tol, "Solver feasibility tolerance")->check(CLI::PositiveNumber);
  app.add_option("--certificate-out", g.certificate_out, "Write certificates as JSON");
  app.add_option("--dump-sdp", g.dump_sdp, "Write the SDP in SDPA-like text form");

  std::map<std::string, std::function<Report()>> handlers;
  auto sub = [&](const char* name, const char* help) {
    CLI::App* s = app.add_subcommand(name, help);
    s->fallthrough();
    return s;
  };

  std::string src, tgt, alpha_text, cone_path, tuple_path, normal_text, m_path, n_path, cert_path, sdp_path,
      eps_text, witness_kind;
  int points = 12;

  auto alpha_value = [&]() -> std::optional<double> {
    if (alpha_text.empty()) return std::nullopt;
    const double a = parse_number("--alpha", alpha_text);
    if (!(a > 0.0 && a < kPi / 2)) throw UsageError("--alpha must lie in (0, pi/2)");
    return a;
  };

  CLI::App* ci = sub("check-inclusion", "Scalar test, relaxation and witness for a cone inside a pencil");
  ci->add_option("--src", src, "Source cone file or 'square'")->required();
  ci->add_option("--tgt", tgt, "Target pencil or cone file, or 'calpha', 'circular', 'square'")->required();
  ci->add_option("--alpha", alpha_text, "Use C(alpha) as the target");
  handlers["check-inclusion"] = [&] {
    io::Input in = src == "square" ? io::Input(square_cone()) : io::parse_input(src);
    if (std::holds_alternative<LinearPencil>(in))
      throw UsageError("--src is a pencil; use the relaxation subcommand for pencil sources");
    if (!std::holds_alternative<PolyhedralCone>(in))
      throw UsageError(src + ": expected a cone, found a " + io::kind_name(in));
    const PolyhedralCone c = std::get<PolyhedralCone>(in);
    const auto alpha = alpha_value();
    const LinearPencil t = alpha ? calpha_pencil(*alpha) : load_pencil(tgt, std::nullopt);
    const LinearPencil s = diagonal_pencil(c);
    dump_sdp(g, relaxation_problem(s, t));
    const InclusionVerdict v = check_inclusion(c, t, solve_options(g));
    Report rep;
    rep.body["scalar"] = v.scalar.holds ? "Holds" : "Fails";
    rep.body["scalar_margins"] = v.scalar.margins;
    rep.body["relaxation"] = to_string(v.relaxation.status);
    rep.body["relaxation_detail"] = relaxation_json(v.relaxation);
    if (v.free_witness) {
      rep.body["witness_level"] = v.free_witness->level;
      rep.body["witness_margin"] = v.free_witness->margin;
      rep.body["witness"] = io::to_json(v.free_witness->tuple);
      rep.certificates.push_back(io::free_witness_certificate(c, t, *v.free_witness));
    } else {
      rep.body["witness"] = nullptr;
    }
    add_relaxation_certificate(rep, s, t, v.relaxation);
    rep.code = v.relaxation.status == RelaxationStatus::Unknown ? 2 : 0;
    return rep;
  };

  CLI::App* re = sub("relaxation", "Completely positive map between two pencils");
  re->add_option("--src", src, "Source pencil or cone")->required();
  re->add_option("--tgt", tgt, "Target pencil or cone")->required();
  re->add_option("--alpha", alpha_text, "Use C(alpha) as the target");
  handlers["relaxation"] = [&] {
    const auto alpha = alpha_value();
    const LinearPencil s = load_pencil(src, std::nullopt);
    const LinearPencil t = alpha ? calpha_pencil(*alpha) : load_pencil(tgt, std::nullopt);
    dump_sdp(g, relaxation_problem(s, t));
    const RelaxationResult r = relaxation(s, t, solve_options(g));
    Report rep;
    rep.body = relaxation_json(r);
    add_relaxation_certificate(rep, s, t, r);
    rep.code = r.status == RelaxationStatus::Unknown ? 2 : 0;
    return rep;
  };

  CLI::App* mn = sub("min-membership", "Membership in the smallest operator system");
  mn->add_option("--cone", cone_path, "Cone file or 'square'")->required();
  mn->add_option("--tuple", tuple_path, "Tuple file")->required();
  handlers["min-membership"] = [&] {
    const PolyhedralCone c = load_cone(cone_path);
    const MatrixTuple a = load_tuple(tuple_path);
    dump_sdp(g, min_membership_problem(c, a));
    const MinMembershipResult r = min_membership(c, a, solve_options(g));
    Report rep;
    rep.body["verdict"] = to_string(r.verdict);
    rep.body["message"] = r.message;
    if (r.certificate) {
      rep.body["residual"] = r.certificate->residual;
      rep.certificates.push_back(io::min_membership_certificate(c, a, *r.certificate));
    }
    if (r.separator) {
      rep.body["query_value"] = r.query_value;
      rep.body["separator_margin"] = r.separator->margin;
      rep.certificates.push_back(io::separator_certificate(c, a, *r.separator));
    }
    rep.code = r.verdict == MinVerdict::Unknown ? 2 : 0;
    return rep;
  };

  CLI::App* mx = sub("max-membership", "Membership in the largest operator system");
  mx->add_option("--cone", cone_path, "Cone file or 'square'")->required();
  mx->add_option("--tuple", tuple_path, "Tuple file")->required();
  handlers["max-membership"] = [&] {
    const MaxMembershipResult r = max_membership(load_cone(cone_path), load_tuple(tuple_path));
    Report rep;
    rep.body = Json{{"membership", to_string(r.kind)}, {"margin", r.margin}, {"worst_facet", r.worst_facet}};
    return rep;
  };

  CLI::App* eb = sub("essential-boundary", "Essential boundary test for the square cone");
  eb->add_option("--tuple", tuple_path, "Tuple of the four components A_1..A_4");
  eb->add_option("--alpha", alpha_text, "Use the components of the Pauli witness at alpha");
  eb->add_option("--eps", eps_text, "Strictness margin");
  handlers["essential-boundary"] = [&] {
    std::array<HermitianMatrix, 4> comps = {HermitianMatrix::zero(1), HermitianMatrix::zero(1),
                                            HermitianMatrix::zero(1), HermitianMatrix::zero(1)};
    const auto alpha = alpha_value();
    if (alpha && !tuple_path.empty()) throw UsageError("give either --tuple or --alpha");
    if (alpha) {
      comps = pauli_witness(*alpha).components;
    } else if (!tuple_path.empty()) {
      const MatrixTuple t = load_tuple(tuple_path);
      if (t.d() != 4) throw UsageError("--tuple must hold four components");
      for (int k = 0; k < 4; ++k) comps[k] = t[k];
    } else {
      throw UsageError("essential-boundary needs --tuple or --alpha");
    }
    const double eps = eps_text.empty() ? kStrictEps : parse_number("--eps", eps_text);
    const EssentialBoundaryResult r = essential_boundary_square(comps, eps, solve_options(g));
    Report rep;
    rep.body["verdict"] = to_string(r.verdict);
    rep.body["margin"] = r.margin;
    rep.body["orthogonality"] = r.orthogonality;
    rep.body["message"] = r.message;
    if (r.verdict == EssentialVerdict::InEssentialBoundary)
      rep.certificates.push_back(io::essential_boundary_certificate(comps, *r.m3, *r.d, *r.s, eps));
    rep.code = r.verdict == EssentialVerdict::Unknown ? 2 : 0;
    return rep;
  };

  CLI::App* sb = sub("scaling-bound", "Scaling factors nu with (nu-scaled C)^max inside C^min");
  sb->add_option("--cone", cone_path, "Cone file or 'square'")->required();
  sb->add_option("--normal", normal_text, "Hyperplane normal h as comma-separated numbers (default: the unit)");
  handlers["scaling-bound"] = [&] {
    const PolyhedralCone c = load_cone(cone_path);
    const RVector h = normal_text.empty() ? RVector(c.unit()) : parse_vector("--normal", normal_text);
    if (h.size() != c.dim()) throw UsageError("--normal has the wrong length");
    const ScalingBound b = scaling_bound(c, h);
    Report rep;
    rep.body["nu_general"] = b.nu_general;
    rep.body["nu_symmetric"] = b.nu_symmetric ? Json(*b.nu_symmetric) : Json(nullptr);
    rep.body["certified_nu"] = b.certified_nu;
    if (b.certificate) {
      rep.body["simplex"] = io::to_json(*b.certificate)["generators"];
      rep.certificates.push_back(io::sandwich_certificate(c, b.certified_nu, h, *b.certificate));
    }
    return rep;
  };

  CLI::App* co = sub("comei", "Compare lambda_max(N^2 - M) with max (v*Nv)^2 - v*Mv");
  co->add_option("--M", m_path, "Matrix file for M")->required();
  co->add_option("--N", n_path, "Matrix file for N")->required();
  handlers["comei"] = [&] {
    const HermitianMatrix m = load_matrix(m_path), n = load_matrix(n_path);
    Lambda2Options lo;
    lo.seed = g.seed;
    const double l1 = comei_lambda1(m, n);
    const Lambda2Result l2 = comei_lambda2(m, n, lo);
    Report rep;
    rep.body["lambda1"] = l1;
    rep.body["lambda2"] = l2.value;
    rep.body["lambda2_lower_bound_only"] = l2.lower_bound_only;
    rep.body["gap"] = l1 - l2.value;
    rep.body["argmax"] = io::to_json(CMatrix(l2.argmax));
    return rep;
  };

  CLI::App* wi = sub("witness", "Level-2 witnesses: 'square' against C(alpha), or 'pauli'");
  wi->add_option("kind", witness_kind, "square or pauli")->required()->check(CLI::IsMember({"square", "pauli"}));
  wi->add_option("--alpha", alpha_text, "Angle in (0, pi/2)")->required();
  handlers["witness"] = [&] {
    const double alpha = *alpha_value();
    Report rep;
    if (witness_kind == "square") {
      const FreeWitness w = free_witness_square(alpha);
      rep.body["tuple"] = io::to_json(w.tuple);
      rep.body["margin"] = w.margin;
      rep.body["expected"] = 1.0 - std::sin(alpha) - std::cos(alpha);
      rep.body["max_membership"] = to_string(max_membership(square_cone(), w.tuple).kind);
      rep.certificates.push_back(io::free_witness_certificate(square_cone(), calpha_pencil(alpha), w));
    } else {
      const PauliWitness w = pauli_witness(alpha);
      const MinMembershipResult mr = min_membership(square_cone(), w.tuple, solve_options(g));
      rep.body["tuple"] = io::to_json(w.tuple);
      rep.body["min_membership"] = to_string(mr.verdict);
      if (mr.certificate) {
        rep.body["residual"] = mr.certificate->residual;
        rep.certificates.push_back(io::min_membership_certificate(square_cone(), w.tuple, *mr.certificate));
      }
      rep.code = mr.verdict == MinVerdict::Unknown ? 2 : 0;
    }
    return rep;
  };

  sub("entangled-demo", "The entangled matrix behind the ball pencil");
  handlers["entangled-demo"] = [&] {
    const EntangledReport r = entangled_example();
    Report rep;
    rep.body["x"] = io::to_json(r.x);
    rep.body["identity_residual"] = r.identity_residual;
    rep.body["pt_min_eigenvalue"] = r.pt_min_eigenvalue;
    rep.body["pt_min_eigenvalue_projection"] = r.pt_min_eigenvalue_projection;
    rep.body["projection_residual"] = r.projection_residual;
    rep.body["entangled"] = r.entangled;
    rep.body["minimal_realization"] = r.minimal_realization;
    rep.body["conclusion"] = r.conclusion;
    return rep;
  };

  CLI::App* ve = sub("verify", "Re-check a certificate file");
  ve->add_option("certificate", cert_path, "Certificate JSON")->required();
  handlers["verify"] = [&] {
    const Json j = io::read_json_file(cert_path);
    std::vector<Json> certs;
    if (j.is_object() && j.value("kind", "") == "bundle") certs.assign(j["certificates"].begin(), j["certificates"].end());
    else certs.push_back(j);
    Report rep;
    Json results = Json::array();
    bool all = true;
    for (const auto& c : certs) {
      const io::CertificateCheck chk = io::verify_certificate(c);
      all = all && chk.ok;
      results.push_back(Json{{"kind", chk.kind}, {"valid", chk.ok}, {"residual", chk.residual}, {"detail", chk.detail}});
    }
    rep.body["valid"] = all;
    rep.body["certificates"] = results;
    rep.code = all ? 0 : 2;
    return rep;
  };

  CLI::App* ss = sub("sdp-solve", "Solve an SDP in the dump format");
  ss->add_option("problem", sdp_path, "Problem file")->required();
  handlers["sdp-solve"] = [&] {
    std::ifstream f(sdp_path);
    if (!f) throw UsageError(sdp_path + ": cannot open file");
    const sdp::SdpProblem p = sdp::read_sdpa(f);
    const sdp::SdpOutcome o = sdp::solve(p, solve_options(g));
    const sdp::VerifyReport v = sdp::verify(o, p);
    Report rep;
    rep.body["status"] = sdp::to_string(o.status);
    if (o.objective_value) rep.body["objective"] = *o.objective_value;
    rep.body["iterations"] = o.iterations;
    rep.body["verified"] = v.ok;
    rep.body["max_residual"] = v.max_residual;
    rep.body["message"] = o.message;
    if (o.status != sdp::Status::NumericalFailure) rep.certificates.push_back(io::sdp_certificate(p, o));
    rep.code = o.status == sdp::Status::NumericalFailure ? 2 : 0;
    return rep;
  };

  CLI::App* st = sub("section-table", "Boundary points of the section of C(alpha) at x_3 = 1");
  st->add_option("--alpha", alpha_text, "Angle in (0, pi/2)")->required();
  st->add_option("--points", points, "Number of directions")->check(CLI::Range(1, 100000));
  handlers["section-table"] = [&] {
    const double alpha = *alpha_value();
    Json rows = Json::array();
    for (int k = 0; k < points; ++k) {
      const double th = 2 * kPi * k / points;
      // I + t (cos th sin(alpha) sz + sin th cos(alpha) sx) >= 0 up to t = 1/|.|.
      const double rad = 1.0 / std::hypot(std::cos(th) * std::sin(alpha), std::sin(th) * std::cos(alpha));
      rows.push_back(Json::array({th, rad * std::cos(th), rad * std::sin(th)}));
    }
    Report rep;
    rep.body["alpha"] = alpha;
    rep.body["columns"] = Json::array({"theta", "x1", "x2"});
    rep.body["rows"] = rows;
    return rep;
  };

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  }
  const std::string name = app.get_subcommands().front()->get_name();
  try {
    Report rep = handlers.at(name)();
    if (!g.certificate_out.empty() && !rep.certificates.empty()) {
      std::ofstream f(g.certificate_out);
      if (!f) throw UsageError("--certificate-out: cannot write " + g.certificate_out);
      const Json doc = rep.certificates.size() == 1
                           ? rep.certificates[0]
                           : Json{{"kind", "bundle"}, {"certificates", rep.certificates}};
      f << doc.dump(2) << "\n";
    }
    if (g.output == "json") {
      Json doc{{"schema_version", kSchemaVersion}, {"command", name}, {"exit_code", rep.code}};
      doc.update(rep.body);
      out << doc.dump(2) << "\n";
    } else {
      out << std::setprecision(12);
      human(out, rep.body, "");
    }
    return rep.code;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace freespec::cli

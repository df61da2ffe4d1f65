// JSON formats for matrices, cones, pencils, tuples and certificates.
//
// matrix:  [[[re, im], ...], ...]            row-major
// cone:    {"d", "unit", "generators", "facets"?}
// pencil:  {"d", "r", "unit", "matrices"}
// tuple:   {"d", "s", "entries"}
// A certificate is an object with a "kind" field; see verify_certificate.
#pragma once

#include <array>
#include <string>
#include <variant>

#include "json.hpp"

#include "freespec/containment.hpp"
#include "freespec/cones.hpp"
#include "freespec/opsys.hpp"
#include "freespec/pencil.hpp"
#include "freespec/sdp.hpp"

namespace freespec::io {

using Json = nlohmann::ordered_json;

/// Message format: "<source>:<line>: <field path>: <reason>".
class ParseError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

Json to_json(const CMatrix& m);
Json to_json(const HermitianMatrix& m);
Json to_json(const RVector& v);
Json to_json(const PolyhedralCone& c);
Json to_json(const LinearPencil& p);
Json to_json(const MatrixTuple& a);

// The path argument prefixes error messages.
CMatrix complex_matrix_from_json(const Json& j, const std::string& path = "matrix");
HermitianMatrix hermitian_from_json(const Json& j, const std::string& path = "matrix");
RVector vector_from_json(const Json& j, const std::string& path = "vector");
PolyhedralCone cone_from_json(const Json& j);
LinearPencil pencil_from_json(const Json& j);
MatrixTuple tuple_from_json(const Json& j);

/// Syntax errors are reported with line and column.
Json parse_json_text(const std::string& text, const std::string& source = "<input>");
Json read_json_file(const std::string& path);

using Input = std::variant<PolyhedralCone, LinearPencil, MatrixTuple, HermitianMatrix>;
const char* kind_name(const Input& in);

/// Detects the kind from the top-level shape: an array is a matrix, an
/// object with "generators", "matrices" or "entries" a cone, pencil or tuple.
Input parse_input(const std::string& path);
Input parse_input_text(const std::string& text, const std::string& source = "<input>");

Json min_membership_certificate(const PolyhedralCone& c, const MatrixTuple& a,
                                const MinMembershipCertificate& cert);
Json separator_certificate(const PolyhedralCone& c, const MatrixTuple& a, const SeparationFunctional& phi);
Json relaxation_certificate(const LinearPencil& src, const LinearPencil& tgt, const RelaxationCertificate& cert);
Json relaxation_infeasible_certificate(const LinearPencil& src, const LinearPencil& tgt,
                                       const sdp::FarkasCertificate& farkas);
Json essential_boundary_certificate(const std::array<HermitianMatrix, 4>& a, const HermitianMatrix& m3,
                                    const HermitianMatrix& d, const HermitianMatrix& s, double eps);
Json sandwich_certificate(const PolyhedralCone& c, double nu, const RVector& h, const PolyhedralCone& simplex);
Json free_witness_certificate(const PolyhedralCone& src, const LinearPencil& tgt, const FreeWitness& w);
Json sdp_certificate(const sdp::SdpProblem& p, const sdp::SdpOutcome& outcome);

struct CertificateCheck {
  bool ok = false;
  std::string kind;
  double residual = 0.0;
  std::string detail;
};

/// Re-validates a certificate from its stored data alone.
CertificateCheck verify_certificate(const Json& cert);

}  // namespace freespec::io

#pragma once

// JSON encoding of library objects. Complex numbers are {"re", "im"};
// sequences {"d", "N", "envelope": {"M", "k"}, "values": [...]} in window
// enumeration order; sequence matrices {"m", "n", "window", "entries"}
// row-major; dense complex matrices {"m", "n", "entries": [complex...]}.
// Factor indices are one-based on the wire. Parse errors throw InputError
// naming the offending field as a JSON pointer.

#include <json.hpp>

#include <string>

#include "perdist/corona.hpp"
#include "perdist/counterexamples.hpp"
#include "perdist/elem_factor.hpp"
#include "perdist/ideal_theory.hpp"
#include "perdist/ring_core.hpp"
#include "perdist/uniform_factor.hpp"

namespace perdist::io {

using nlohmann::json;

json to_json(Complex z);
json to_json(const LatticeWindow& w);
json to_json(const Envelope& e);
json to_json(const Seq& s);
json to_json(const SeqMat& a);
json dense_to_json(const CMatrix& a);

json to_json(const BezoutCertificate<double>& c, const Seq& a, const Seq& b);
json to_json(const PreBezoutCertificate<double>& c);
json to_json(const BoundConstants& c);
json to_json(const ElementaryFactor<double>& f);
json to_json(const FactorizationReport<double>& r);
json to_json(const UniformFactorization<double>& f, const UniformReport<double>& check);
json to_json(const CoronaCertificate<double>& c, const LatticeWindow& w);
json to_json(const CoronaResult<double>& r, const LatticeWindow& w);
json to_json(const CounterexampleReport& r);
json to_json(const CExampleResult& r);

Complex complex_from_json(const json& j, const std::string& ptr = "");
LatticeWindow window_from_json(const json& j, const std::string& ptr = "");
/// A missing "envelope" is fitted with the given policy.
Seq seq_from_json(const json& j, const std::string& ptr = "", const FitPolicy<double>& policy = {});
SeqMat seqmat_from_json(const json& j, const std::string& ptr = "", const FitPolicy<double>& policy = {});
CMatrix dense_from_json(const json& j, const std::string& ptr = "");
/// Sequence matrix or single sequence (read as 1 x 1).
SeqMat seq_or_matrix_from_json(const json& j, const FitPolicy<double>& policy = {});

json parse_text(const std::string& text, const std::string& source);
json read_file(const std::string& path);
/// Deterministic encoding: sorted keys, shortest round-trip doubles, 2-space indent.
std::string dump(const json& j);

/// Plain-text summary of a report object produced by the functions above.
std::string render_text(const json& j);

}  // namespace perdist::io

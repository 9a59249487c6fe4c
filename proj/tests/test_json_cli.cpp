#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <unistd.h>

#include "oracles.hpp"
#include "perdist/cli.hpp"
#include "perdist/json_io.hpp"
#include "perdist/perdist.hpp"

using namespace perdist;
using io::json;
namespace fs = std::filesystem;

namespace {

struct Scratch {
  fs::path dir;
  Scratch() {
    static int counter = 0;
    dir = fs::temp_directory_path() / ("perdist_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string write(const std::string& name, const std::string& text) const {
    const auto p = dir / name;
    std::ofstream(p) << text;
    return p.string();
  }
  std::string write(const std::string& name, const json& j) const { return write(name, io::dump(j)); }
};

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

Seq random_seq(const LatticeWindow& w, std::mt19937_64& rng) {
  CVector v(w.size());
  for (Index i = 0; i < w.size(); ++i) v[i] = oracle::random_complex(rng) * (1.0 + w.norm1_at(i));
  return Seq::fitted(w, v, 1);
}

}  // namespace

TEST_CASE("serialize, parse, serialize is the identity") {
  std::mt19937_64 rng(5);
  const LatticeWindow w(2, 3);
  const auto s = random_seq(w, rng);
  const std::string once = io::dump(io::to_json(s));
  const auto back = io::seq_from_json(io::parse_text(once, "seq"));
  CHECK(back.values() == s.values());
  CHECK(back.envelope() == s.envelope());
  CHECK(io::dump(io::to_json(back)) == once);

  const SeqMat a(2, 1, {random_seq(w, rng), random_seq(w, rng)});
  const std::string mat = io::dump(io::to_json(a));
  CHECK(io::dump(io::to_json(io::seqmat_from_json(io::parse_text(mat, "m")))) == mat);

  const CMatrix d = oracle::random_sl(3, rng);
  const std::string dense = io::dump(io::dense_to_json(d));
  CHECK(io::dense_from_json(io::parse_text(dense, "d")) == d);
  CHECK(io::dump(io::dense_to_json(io::dense_from_json(io::parse_text(dense, "d")))) == dense);

  CHECK(io::complex_from_json(io::to_json(Complex(0.1, -1e-300))) == Complex(0.1, -1e-300));
  CHECK(io::complex_from_json(json(2.5)) == Complex(2.5));
  CHECK(io::window_from_json(io::to_json(w)) == w);

  // Report objects are stable under a parse/dump cycle as well.
  const auto rep = io::to_json(factor_slm<double>(oracle::random_sl(4, rng)));
  const std::string text = io::dump(rep);
  CHECK(io::dump(io::parse_text(text, "r")) == text);
}

TEST_CASE("parse errors name the offending field") {
  const auto msg = [](const std::string& text) -> std::string {
    try {
      io::seq_from_json(io::parse_text(text, "input"));
    } catch (const InputError& e) {
      return e.what();
    }
    return "";
  };
  CHECK(msg(R"({"d":1,"N":1,"values":[1,2]})").find("/values: expected 3 values") != std::string::npos);
  CHECK(msg(R"({"d":1,"N":1,"values":[1,{"re":1},3]})").find("/values/1/im: missing field") != std::string::npos);
  CHECK(msg(R"({"d":1,"N":1,"values":[1,2,"x"]})").find("/values/2: expected an object") != std::string::npos);
  CHECK(msg(R"({"d":0,"N":1,"values":[]})").find("/d: must be >= 1") != std::string::npos);
  CHECK(msg(R"({"N":1,"values":[]})").find("/d: missing field") != std::string::npos);
  CHECK(msg(R"({"d":1,"N":1,"values":[1,9,1],"envelope":{"M":1,"k":0}})").find("/envelope:") != std::string::npos);
  CHECK(msg(R"({"d":1,"N":1,)").find("malformed JSON") != std::string::npos);
  // Missing envelope is fitted.
  const auto s = io::seq_from_json(io::parse_text(R"({"d":1,"N":1,"values":[1,0,-1]})", "x"));
  CHECK(s.envelope() == Envelope{1, 0});

  const json mixed = {{"m", 1}, {"n", 2}, {"entries", {io::to_json(Seq::one(LatticeWindow(1, 1))), io::to_json(Seq::one(LatticeWindow(1, 2)))}}};
  CHECK_THROWS_AS(io::seqmat_from_json(mixed), WindowMismatch);
}

TEST_CASE("cli: repro c-example") {
  const auto r = cli({"repro", "c-example", "--N", "10000"});
  CHECK(r.code == exit_ok);
  const auto j = json::parse(r.out);
  CHECK(j["overall"] == true);
  CHECK(j["witnesses"].size() == 4);
  for (const auto& w : j["witnesses"]) {
    CHECK(w["near_one"]["x2"].get<double>() > 0.95);
    CHECK(std::abs(w["near_two_thirds"]["x2"].get<double>() - 2.0 / 3) < 0.03);
  }
  const auto text = cli({"--format", "text", "repro", "c-example", "--N", "10000"});
  CHECK(text.code == exit_ok);
  CHECK(text.out.find("PASS ") != std::string::npos);
  CHECK(text.out.find("FAIL ") == std::string::npos);
  CHECK(cli({"repro", "c-example", "--N", "50"}).code == exit_input);
}

TEST_CASE("cli: other reproductions") {
  CHECK(cli({"repro", "noetherian", "--chain", "5"}).code == exit_ok);
  CHECK(cli({"--window", "3,6", "repro", "noetherian", "--chain", "5"}).code == exit_ok);
  CHECK(cli({"--window", "2,3", "repro", "noetherian", "--chain", "5"}).code == exit_input);
  const auto r = cli({"repro", "idempotent"});
  CHECK(r.code == exit_ok);
  CHECK(json::parse(r.out)["checks"].size() == 5);
}

TEST_CASE("cli: solve") {
  Scratch tmp;
  const LatticeWindow w(1, 5);
  const auto id = SeqMat::generate(w, 2, 2, [](std::span<const int>) { return CMatrix(CMatrix::Identity(2, 2)); });
  const auto b = SeqMat::generate(w, 2, 1, [](std::span<const int> n) {
    CMatrix v(2, 1);
    v << double(n[0]), Complex(0, 1);
    return v;
  }, 1);
  const auto a_path = tmp.write("a.json", io::to_json(id));
  const auto b_path = tmp.write("b.json", io::to_json(b));
  const auto r = cli({"solve", a_path, b_path});
  REQUIRE(r.code == exit_ok);
  const auto j = json::parse(r.out);
  CHECK(j["verdict"] == "solvable");
  const auto x = io::seqmat_from_json(j["solution"]);
  for (Index i = 0; i < w.size(); ++i) CHECK(x.at(i) == b.at(i));

  // The 1/(1+n^2) system needs k = 2, so bounded mode says no.
  const auto decay = SeqMat::generate(w, 1, 1, [](std::span<const int> n) {
    return CMatrix::Constant(1, 1, 1 / (1 + double(n[0]) * n[0]));
  }, 0);
  const auto one = Seq::one(w);
  const auto d_path = tmp.write("decay.json", io::to_json(decay));
  const auto one_path = tmp.write("one.json", io::to_json(one));
  CHECK(cli({"solve", d_path, one_path}).code == exit_ok);
  CHECK(cli({"solve", d_path, one_path, "--k", "2"}).code == exit_ok);
  const auto bd = cli({"solve", d_path, one_path, "--bounded"});
  CHECK(bd.code == exit_negative);
  CHECK(json::parse(bd.out)["margin_degenerate"] == true);

  // Range failure: A vanishes at n = 2.
  const auto holey = SeqMat::generate(w, 1, 1, [](std::span<const int> n) {
    return CMatrix::Constant(1, 1, n[0] == 2 ? 0.0 : 1.0);
  });
  const auto h = cli({"solve", tmp.write("h.json", io::to_json(holey)), one_path});
  CHECK(h.code == exit_negative);
  const auto hj = json::parse(h.out);
  CHECK(hj["verdict"] == "unsolvable");
  CHECK(hj["witness_point"] == json::array({2}));

  // Window mismatch between A and b, and against --window.
  const auto other = tmp.write("other.json", io::to_json(Seq::one(LatticeWindow(1, 4))));
  const auto mm = cli({"solve", d_path, other});
  CHECK(mm.code == exit_input);
  CHECK(mm.err.find("window") != std::string::npos);
  CHECK(cli({"--window", "1,4", "solve", d_path, one_path}).code == exit_input);
  CHECK(cli({"--window", "1,5", "solve", d_path, one_path}).code == exit_ok);
}

TEST_CASE("cli: factor") {
  Scratch tmp;
  CMatrix det2 = CMatrix::Identity(2, 2);
  det2(0, 0) = 2;
  const auto bad = cli({"factor", "slm", tmp.write("det2.json", io::dense_to_json(det2))});
  CHECK(bad.code == exit_input);
  CHECK(bad.err.find("det") != std::string::npos);

  std::mt19937_64 rng(9);
  const auto good = cli({"factor", "slm", tmp.write("sl.json", io::dense_to_json(oracle::random_sl(4, rng)))});
  CHECK(good.code == exit_ok);
  CHECK(json::parse(good.out)["within_bounds"] == true);

  CMatrix near = CMatrix::Identity(3, 3);
  near(0, 1) = 0.01;
  near(2, 0) = -0.005;
  const auto ni = cli({"factor", "near-identity", tmp.write("near.json", io::dense_to_json(near))});
  CHECK(ni.code == exit_ok);
  CHECK(json::parse(ni.out)["within_bounds"] == true);

  const LatticeWindow w(1, 10);
  const auto shear = SeqMat::generate(w, 2, 2, [](std::span<const int> n) {
    CMatrix a(2, 2);
    a << 1, 0, double(n[0]), 1;
    return a;
  }, 1);
  const auto seq = cli({"factor", "sequence", tmp.write("shear.json", io::to_json(shear))});
  CHECK(seq.code == exit_ok);
  CHECK(json::parse(seq.out)["verification"]["passed"] == true);
}

TEST_CASE("cli: seq and ideal") {
  Scratch tmp;
  const LatticeWindow w(1, 3);
  const auto a = Seq::generate(w, [](std::span<const int> n) { return double(n[0]); }, 1);
  const auto b = Seq::generate(w, [](std::span<const int> n) { return n[0] == 0 ? 0.0 : 1.0; });
  const auto ap = tmp.write("a.json", io::to_json(a));
  const auto bp = tmp.write("b.json", io::to_json(b));
  const auto sum = cli({"seq", "add", ap, bp});
  REQUIRE(sum.code == exit_ok);
  CHECK(io::seq_from_json(json::parse(sum.out)).values() == add(a, b).values());
  CHECK(cli({"seq", "mul", ap, bp}).code == exit_ok);
  CHECK(cli({"seq", "fit", ap}).code == exit_ok);
  CHECK(cli({"seq", "add", ap}).code == exit_input);
  CHECK(cli({"seq", "bogus", ap}).code == exit_input);
  const auto ind = cli({"seq", "indicator", ap});
  CHECK(io::seq_from_json(json::parse(ind.out)).values() == zero_indicator(a).values());

  const auto bz = cli({"ideal", "bezout", ap, bp});
  CHECK(bz.code == exit_ok);
  CHECK(json::parse(bz.out)["verified"] == true);
  CHECK(cli({"ideal", "prebezout", ap, bp}).code == exit_ok);
  CHECK(cli({"ideal", "kernel", ap}).code == exit_ok);
  CHECK(cli({"ideal", "gcd", ap, tmp.write("c.json", io::to_json(Seq::one(LatticeWindow(1, 4))))}).code == exit_input);

  const auto broken = cli({"seq", "modulus", tmp.write("broken.json", std::string(R"({"d":1,"N":3,"values":[1,2]})"))});
  CHECK(broken.code == exit_input);
  CHECK(broken.err.find("/values") != std::string::npos);
  CHECK(cli({"seq", "modulus", (tmp.dir / "missing.json").string()}).code == exit_input);
}

TEST_CASE("cli: options and output") {
  Scratch tmp;
  CHECK(cli({"--help"}).code == exit_ok);
  CHECK(cli({}).code == exit_input);
  CHECK(cli({"frobnicate"}).code == exit_input);
  CHECK(cli({"--window", "x", "repro", "idempotent"}).code == exit_input);
  CHECK(cli({"--format", "xml", "repro", "idempotent"}).code == exit_input);
  const auto path = (tmp.dir / "report.json").string();
  const auto r = cli({"--out", path, "repro", "idempotent"});
  CHECK(r.code == exit_ok);
  CHECK(r.out.empty());
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == cli({"repro", "idempotent"}).out);
}

TEST_CASE("cli output is deterministic") {
  const std::vector<std::vector<std::string>> runs{
      {"repro", "c-example", "--N", "2000"}, {"repro", "noetherian"}, {"repro", "idempotent"}};
  for (const auto& args : runs) {
    const auto one = cli(args);
    const unsigned saved = max_threads();
    set_max_threads(saved == 1 ? 3 : 1);
    const auto two = cli(args);
    set_max_threads(saved);
    CHECK(one.code == two.code);
    CHECK(one.out == two.out);
  }
}

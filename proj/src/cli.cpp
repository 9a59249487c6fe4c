#include "perdist/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <optional>

#include "perdist/json_io.hpp"

namespace perdist {
namespace {

struct RunConfig {
  double tol{1e-9};
  double tau{0};
  int k_max{8};
  std::string window;
  std::string out_path;
  std::string format{"json"};
};

std::optional<LatticeWindow> parse_window(const std::string& text) {
  if (text.empty()) return std::nullopt;
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw InputError("--window: expected d,N");
  try {
    std::size_t used = 0;
    const int d = std::stoi(text.substr(0, comma), &used);
    if (used != comma) throw InputError("--window: expected d,N");
    const std::string rest = text.substr(comma + 1);
    const int n = std::stoi(rest, &used);
    if (used != rest.size()) throw InputError("--window: expected d,N");
    if (d < 1 || n < 0) throw InputError("--window: need d >= 1 and N >= 0");
    return LatticeWindow(d, n);
  } catch (const std::logic_error&) {
    throw InputError("--window: expected d,N");
  }
}

class Runner {
 public:
  Runner(const RunConfig& cfg, std::ostream& out) : cfg_(cfg), out_(out), window_(parse_window(cfg.window)) {}

  FitPolicy<double> policy() const { return {cfg_.k_max, 1e9}; }

  // Loads and checks against --window when given.
  Seq seq(const std::string& path) const {
    auto s = io::seq_from_json(io::read_file(path), "", policy());
    if (window_) require_same_window(*window_, s.window());
    return s;
  }
  SeqMat seqmat(const std::string& path) const {
    auto a = io::seq_or_matrix_from_json(io::read_file(path), policy());
    if (window_) require_same_window(*window_, a.window());
    return a;
  }
  CMatrix dense(const std::string& path) const { return io::dense_from_json(io::read_file(path)); }
  LatticeWindow window_or(int d, int n) const { return window_ ? *window_ : LatticeWindow(d, n); }

  int emit(const io::json& j, int code) const {
    const std::string text = cfg_.format == "text" ? io::render_text(j) : io::dump(j);
    if (cfg_.out_path.empty()) {
      out_ << text;
    } else {
      std::ofstream f(cfg_.out_path, std::ios::binary);
      if (!f) throw InputError(cfg_.out_path + ": cannot write");
      f << text;
    }
    return code;
  }

  const RunConfig& config() const { return cfg_; }

 private:
  const RunConfig& cfg_;
  std::ostream& out_;
  std::optional<LatticeWindow> window_;
};

io::json failure_json(const Failure& f, const LatticeWindow& w) {
  io::json j = {{"verified", false}, {"reason", f.reason}, {"witness_point", nullptr}};
  if (f.point) {
    auto p = w.point(*f.point);
    j["witness_point"] = std::vector<int>(p.begin(), p.end());
  }
  return j;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Windowed computations in the ring of polynomial-growth sequences", "perdist"};
  app.fallthrough();
  app.require_subcommand(1);
  RunConfig cfg;
  app.add_option("--tol", cfg.tol, "Determinant / residual tolerance")->check(CLI::PositiveNumber);
  app.add_option("--tau", cfg.tau, "Zero threshold for indicators (0 = exact)")->check(CLI::NonNegativeNumber);
  app.add_option("--k-max", cfg.k_max, "Largest envelope exponent searched")->check(CLI::NonNegativeNumber);
  app.add_option("--window", cfg.window, "Window d,N");
  app.add_option("--out", cfg.out_path, "Write the report here instead of stdout");
  app.add_option("--format", cfg.format, "Report format")->check(CLI::IsMember({"json", "text"}));

  std::function<int(const Runner&)> action;

  // seq
  auto* seq_cmd = app.add_subcommand("seq", "Pointwise ring operations");
  std::string seq_op;
  std::vector<std::string> seq_inputs;
  seq_cmd->add_option("op", seq_op, "add|mul|modulus|unimodular|conjugate|indicator|fit")
      ->required()
      ->check(CLI::IsMember({"add", "mul", "modulus", "unimodular", "conjugate", "indicator", "fit"}));
  seq_cmd->add_option("inputs", seq_inputs, "Sequence JSON files")->required();
  seq_cmd->callback([&] {
    action = [&](const Runner& r) {
      const bool binary = seq_op == "add" || seq_op == "mul";
      if (seq_inputs.size() != (binary ? 2u : 1u)) {
        throw InputError("seq " + seq_op + " takes " + (binary ? "2" : "1") + " input file(s)");
      }
      const Seq a = r.seq(seq_inputs[0]);
      if (seq_op == "add") return r.emit(io::to_json(add(a, r.seq(seq_inputs[1]))), exit_ok);
      if (seq_op == "mul") return r.emit(io::to_json(mul(a, r.seq(seq_inputs[1]))), exit_ok);
      if (seq_op == "modulus") return r.emit(io::to_json(modulus(a)), exit_ok);
      if (seq_op == "unimodular") return r.emit(io::to_json(unimodular_part(a)), exit_ok);
      if (seq_op == "conjugate") return r.emit(io::to_json(conjugate(a)), exit_ok);
      if (seq_op == "indicator") return r.emit(io::to_json(zero_indicator(a, r.config().tau)), exit_ok);
      auto env = fit_envelope_capped(a.window(), a.values(), r.policy());
      if (!env) return r.emit(failure_json(env.failure(), a.window()), exit_negative);
      return r.emit(io::to_json(a.with_envelope(*env)), exit_ok);
    };
  });

  // ideal
  auto* ideal_cmd = app.add_subcommand("ideal", "Bezout, gcd, annihilator and pre-Bezout witnesses");
  std::string ideal_op;
  std::vector<std::string> ideal_inputs;
  ideal_cmd->add_option("op", ideal_op, "bezout|gcd|kernel|prebezout")
      ->required()
      ->check(CLI::IsMember({"bezout", "gcd", "kernel", "prebezout"}));
  ideal_cmd->add_option("inputs", ideal_inputs, "Sequence JSON files: a [b [d]]")->required();
  ideal_cmd->callback([&] {
    action = [&](const Runner& r) {
      const std::size_t want_min = ideal_op == "kernel" ? 1 : 2;
      const std::size_t want_max = ideal_op == "kernel" ? 1 : ideal_op == "prebezout" ? 3 : 2;
      if (ideal_inputs.size() < want_min || ideal_inputs.size() > want_max) {
        throw InputError("ideal " + ideal_op + ": wrong number of input files");
      }
      const Seq a = r.seq(ideal_inputs[0]);
      if (ideal_op == "kernel") return r.emit(io::to_json(kernel_generator(a, r.config().tau)), exit_ok);
      const Seq b = r.seq(ideal_inputs[1]);
      require_same_window(a.window(), b.window());
      if (ideal_op == "gcd") return r.emit(io::to_json(gcd(a, b)), exit_ok);
      if (ideal_op == "bezout") {
        const auto cert = bezout_generator(a, b);
        return r.emit(io::to_json(cert, a, b), cert.verified(a, b) ? exit_ok : exit_negative);
      }
      const Seq d = ideal_inputs.size() == 3 ? r.seq(ideal_inputs[2]) : gcd(a, b);
      const auto cert = pre_bezout(a, b, d, r.policy());
      if (!cert) return r.emit(failure_json(cert.failure(), a.window()), exit_negative);
      return r.emit(io::to_json(*cert), cert->verified() ? exit_ok : exit_negative);
    };
  });

  // factor
  auto* factor_cmd = app.add_subcommand("factor", "Elementary-matrix factorizations");
  std::string factor_op;
  std::string factor_input;
  double rho = -1;
  factor_cmd->add_option("op", factor_op, "slm|near-identity|sequence")
      ->required()
      ->check(CLI::IsMember({"slm", "near-identity", "sequence"}));
  factor_cmd->add_option("input", factor_input, "Matrix JSON file")->required();
  factor_cmd->add_option("--rho", rho, "Radius for near-identity (default ||C - I||_inf)");
  factor_cmd->callback([&] {
    action = [&](const Runner& r) {
      const double tol = r.config().tol;
      if (factor_op == "slm") {
        const auto rep = factor_slm<double>(r.dense(factor_input), tol);
        return r.emit(io::to_json(rep), rep.within_bounds(tol) ? exit_ok : exit_negative);
      }
      if (factor_op == "near-identity") {
        const CMatrix c = r.dense(factor_input);
        const double radius = rho >= 0 ? rho : max_entry_norm((c - CMatrix::Identity(c.rows(), c.cols())).eval());
        const auto factors = factor_near_identity<double>(c, radius, tol);
        double coeff_max = 0;
        io::json list = io::json::array();
        for (const auto& f : factors) {
          list.push_back(io::to_json(f));
          coeff_max = std::max(coeff_max, std::abs(f.coeff));
        }
        const auto m = static_cast<int>(c.rows());
        const auto bounds = near_identity_bounds(m, radius);
        const double residual = max_entry_norm((ordered_product(c.rows(), factors) - c).eval());
        const bool ok = residual <= 1e-12 * (1 + max_entry_norm(c)) &&
                        coeff_max <= std::max(bounds.triangular, bounds.diagonal) * (1 + 1e-12);
        return r.emit({{"m", m},
                       {"rho", radius},
                       {"rho_max", near_identity_radius(m)},
                       {"factors", list},
                       {"factor_count", factors.size()},
                       {"max_coefficient", coeff_max},
                       {"triangular_bound", bounds.triangular},
                       {"diagonal_bound", bounds.diagonal},
                       {"residual", residual},
                       {"within_bounds", ok}},
                      ok ? exit_ok : exit_negative);
      }
      const SeqMat a = r.seqmat(factor_input);
      const auto f = factor_slm_sequence(a, tol);
      const auto check = verify_uniform_factorization(a, f, tol);
      return r.emit(io::to_json(f, check), check.passed() ? exit_ok : exit_negative);
    };
  });

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "Corona-type solvability test and least-norm solve");
  std::string a_path;
  std::string b_path;
  bool bounded = false;
  std::optional<int> fixed_k;
  solve_cmd->add_option("A", a_path, "Sequence matrix JSON (m x n)")->required();
  solve_cmd->add_option("b", b_path, "Sequence matrix JSON (m x 1) or a single sequence")->required();
  solve_cmd->add_flag("--bounded", bounded, "Bounded-sequence mode (k pinned to 0)");
  solve_cmd->add_option("--k", fixed_k, "Use this exponent instead of searching 0..k-max")
      ->check(CLI::NonNegativeNumber);
  solve_cmd->callback([&] {
    action = [&](const Runner& r) {
      const SeqMat a = r.seqmat(a_path);
      const SeqMat b = r.seqmat(b_path);
      require_same_window(a.window(), b.window());
      CoronaResult<double> res;
      if (bounded) {
        res = solve_bounded(a, b);
      } else if (fixed_k) {
        res.certificate = corona_check_sequence(a, b, *fixed_k);
        if (res.certificate.verdict == Verdict::solvable) res.solution = solve_sequence(a, b, res.certificate);
      } else {
        res = solve(a, b, r.config().k_max);
      }
      return r.emit(io::to_json(res, a.window()),
                    res.certificate.verdict == Verdict::solvable ? exit_ok : exit_negative);
    };
  });

  // repro
  auto* repro_cmd = app.add_subcommand("repro", "Reproduce the counterexamples");
  std::string which;
  int radius = 10000;
  int chain = 5;
  double eps = 0.05;
  repro_cmd->add_option("which", which, "noetherian|idempotent|c-example")
      ->required()
      ->check(CLI::IsMember({"noetherian", "idempotent", "c-example"}));
  repro_cmd->add_option("--N", radius, "Window radius for c-example")->check(CLI::NonNegativeNumber);
  repro_cmd->add_option("--chain", chain, "Number of strict inclusions for noetherian")->check(CLI::PositiveNumber);
  repro_cmd->add_option("--eps", eps, "Subsequence tolerance for c-example");
  repro_cmd->callback([&] {
    action = [&](const Runner& r) {
      if (which == "noetherian") {
        const auto rep = noetherian_chain(chain, r.window_or(2, chain));
        return r.emit(io::to_json(rep), rep.overall() ? exit_ok : exit_negative);
      }
      if (which == "idempotent") {
        const auto res = parity_idempotent(r.window_or(2, 4));
        return r.emit(io::to_json(res.report), res.report.overall() ? exit_ok : exit_negative);
      }
      const auto res = c_counterexample(radius, eps);
      return r.emit(io::to_json(res), res.report.overall() ? exit_ok : exit_negative);
    };
  });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_input;
  }
  try {
    const Runner runner(cfg, out);
    return action(runner);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_input;
  }
}

}  // namespace perdist

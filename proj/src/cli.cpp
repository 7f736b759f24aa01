#include "matfn/cli.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "matfn/errors.hpp"
#include "matfn/io.hpp"
#include "matfn/iss.hpp"
#include "matfn/jordan.hpp"
#include "matfn/linalg.hpp"
#include "matfn/matfuncs.hpp"

namespace matfn::cli {

namespace {

using nlohmann::json;

struct Options {
  std::optional<double> tol_cluster;
  std::optional<double> tol_rank;
  double tol_residual = 1e-10;
  std::string branch = "principal";
  unsigned p = 2;
  bool p_given = false;
  std::string format = "text";
  std::string output;
  std::string kind;
  std::vector<std::string> files;

  Tolerances tolerances() const { return {tol_cluster, tol_rank, tol_residual}; }
};

struct Report {
  std::string command;
  std::vector<std::string> args;
  std::size_t n = 0;
  std::optional<RealMatrix> matrix;
  std::vector<std::string> lines;  // printed in place of the matrix block
  std::optional<double> residual;
  std::vector<std::pair<std::string, json>> fields;
  double time_ms = 0.0;

  void add(std::string key, json value) { fields.emplace_back(std::move(key), std::move(value)); }
};

std::string format_complex(Complex z) {
  std::string s = io::format_number(z.real());
  if (z.imag() != 0.0) s += (z.imag() < 0 ? "-" : "+") + io::format_number(std::abs(z.imag())) + "i";
  return s;
}

std::string block_line(const JordanStructure::Group& g) {
  std::string value;
  if (g.kind == BlockKind::Paired) {
    value = io::format_number(g.eigenvalue.real());
    if (g.eigenvalue.imag() != 0.0) value += "+/-" + io::format_number(g.eigenvalue.imag()) + "i";
  } else {
    value = format_complex(g.eigenvalue);
  }
  std::string line = "(" + value + ", size " + std::to_string(g.size) + ", count " +
                     std::to_string(g.count);
  if (g.kind == BlockKind::Paired) line += ", paired";
  return line + ")";
}

std::string field_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) return io::format_number(v.get<double>());
  return v.dump();
}

void emit(const Report& r, const Options& opt, std::ostream& out, std::ostream& err) {
  if (opt.format == "json") {
    json j;
    j["command"] = r.command;
    j["args"] = r.args;
    j["n"] = r.n;
    if (r.matrix) j["matrix"] = io::to_json(*r.matrix)["rows"];
    if (!r.lines.empty()) j["lines"] = r.lines;
    if (r.residual) j["residual"] = *r.residual;
    for (const auto& [k, v] : r.fields) j[k] = v;
    j["time_ms"] = r.time_ms;
    out << j.dump() << '\n';
    return;
  }
  out << "matfn " << r.command << " n=" << r.n << '\n';
  if (r.matrix) out << io::format_dense_text(*r.matrix);
  for (const auto& l : r.lines) out << l << '\n';
  if (r.residual) out << "residual=" << io::format_number(*r.residual) << '\n';
  for (const auto& [k, v] : r.fields) out << k << '=' << field_text(v) << '\n';
  err << "time_ms=" << r.time_ms << '\n';
}

void add_result(Report& r, const FnResult& f) {
  r.matrix = f.value;
  r.residual = f.residual;
  r.add("branch", to_string(f.branch));
  r.add("domain_ok", f.domain_ok);
  if (f.near_negative_axis) r.add("warning", "spectrum is close to the negative real axis");
}

void add_verdict(Report& r, const ExistenceVerdict& v) {
  r.add("verdict", v.exists ? "exists" : "does-not-exist");
  r.add("invertible", v.invertible);
  if (!v.offending.empty()) r.add("offending", describe_blocks(v.offending));
  if (v.singular_caveat) r.add("caveat", "singular matrix: criterion assumes invertibility");
}

void write_output(const Options& opt, const RealMatrix& m) {
  if (opt.output.empty()) return;
  const bool json_out = opt.output.size() >= 5 && opt.output.ends_with(".json");
  io::write_matrix_file(opt.output, m, json_out ? io::Format::Json : io::Format::DenseText);
}

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void require_files(const Options& opt, std::size_t count) {
  if (opt.files.size() != count)
    throw UsageError("expected " + std::to_string(count) + " matrix file(s), got " +
                     std::to_string(opt.files.size()));
}

bool any_branch(const Options& opt) {
  if (opt.branch == "any") return true;
  if (opt.branch == "principal") return false;
  throw UsageError("--branch must be 'principal' or 'any'");
}

// Each handler fills the report and returns the exit code.
using Handler = std::function<int(const Options&, Report&)>;

int cmd_eig(const Options& opt, Report& r) {
  const RealMatrix a = io::read_matrix_file(opt.files[0]);
  r.n = a.size();
  const RealSchur schur = real_schur(a);
  for (const auto& e : eigenvalues(a, opt.tolerances()))
    r.lines.push_back("(" + format_complex(e.value) + ", multiplicity " +
                      std::to_string(e.multiplicity) + ")");
  r.residual = relative_difference(a, schur.q * schur.t * schur.q.transpose());
  return kSuccess;
}

int cmd_jordan(const Options& opt, Report& r) {
  const RealMatrix a = io::read_matrix_file(opt.files[0]);
  r.n = a.size();
  const Tolerances tol = opt.tolerances();
  const ComplexJordanForm form = jordan_chains(a, jordan_structure(a, tol), tol);
  for (const auto& g : form.structure.groups()) r.lines.push_back(block_line(g));
  r.residual = form.residual;
  return kSuccess;
}

int cmd_real_jordan(const Options& opt, Report& r) {
  const RealMatrix a = io::read_matrix_file(opt.files[0]);
  r.n = a.size();
  const RealJordanForm form = real_jordan_form(a, opt.tolerances());
  for (const auto& g : form.structure.groups()) r.lines.push_back(block_line(g));
  r.residual = form.residual;
  write_output(opt, form.p);
  return kSuccess;
}

int cmd_check(const Options& opt, Report& r, bool sqrt) {
  const RealMatrix a = io::read_matrix_file(opt.files[0]);
  r.n = a.size();
  const ExistenceVerdict v =
      sqrt ? has_real_sqrt(a, opt.tolerances()) : has_real_log(a, opt.tolerances());
  add_verdict(r, v);
  return v.exists ? kSuccess : kPrecondition;
}

int cmd_log(const Options& opt, Report& r) {
  const RealMatrix a = io::read_matrix_file(opt.files[0]);
  r.n = a.size();
  const FnResult f = any_branch(opt) ? real_log(a, opt.tolerances()) : principal_log(a, opt.tolerances());
  add_result(r, f);
  write_output(opt, f.value);
  return kSuccess;
}

int cmd_sqrt(const Options& opt, Report& r) {
  const RealMatrix a = io::read_matrix_file(opt.files[0]);
  r.n = a.size();
  const FnResult f =
      any_branch(opt) ? real_sqrt(a, opt.tolerances()) : principal_sqrt(a, opt.tolerances());
  add_result(r, f);
  write_output(opt, f.value);
  return kSuccess;
}

int cmd_root(const Options& opt, Report& r) {
  if (any_branch(opt)) throw UsageError("root supports only --branch principal");
  if (!opt.p_given) throw UsageError("root needs -p");
  const RealMatrix a = io::read_matrix_file(opt.files[0]);
  r.n = a.size();
  const FnResult f = principal_root(a, opt.p, opt.tolerances());
  add_result(r, f);
  r.add("p", opt.p);
  write_output(opt, f.value);
  return kSuccess;
}

int cmd_exp(const Options& opt, Report& r) {
  const RealMatrix a = io::read_matrix_file(opt.files[0]);
  r.n = a.size();
  const RealMatrix e = expm(a);
  // Self-consistency of the scaling identity e^A = (e^(A/2))^2.
  const RealMatrix half = expm(a * 0.5);
  r.matrix = e;
  r.residual = relative_difference(e, half * half);
  write_output(opt, e);
  return kSuccess;
}

int cmd_iss_log(const Options& opt, Report& r) {
  const RealMatrix a = io::read_matrix_file(opt.files[0]);
  r.n = a.size();
  const IssReport rep = iss_log(a, kIssMaxRoots, opt.tolerances());
  r.matrix = rep.value;
  r.residual = residual(a, rep.value, ResidualKind::Log);
  r.add("k", rep.k);
  r.add("series_terms", rep.series_terms);
  r.add("final_closeness", rep.final_closeness);
  write_output(opt, rep.value);
  return kSuccess;
}

int cmd_verify(const Options& opt, Report& r) {
  const RealMatrix a = io::read_matrix_file(opt.files[0]);
  const RealMatrix x = io::read_matrix_file(opt.files[1]);
  if (a.size() != x.size()) throw UsageError("A and X must have the same dimension");
  r.n = a.size();
  ResidualKind kind;
  if (opt.kind == "log") kind = ResidualKind::Log;
  else if (opt.kind == "sqrt") kind = ResidualKind::Sqrt;
  else if (opt.kind == "root") kind = ResidualKind::Root;
  else throw UsageError("--kind must be log, sqrt or root");
  if (kind == ResidualKind::Root && !opt.p_given) throw UsageError("--kind root needs -p");
  r.residual = residual(a, x, kind, opt.p);
  r.add("kind", opt.kind);
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Real logarithms, square roots and p-th roots of real matrices", "matfn"};
  app.require_subcommand(1);
  Options opt;

  struct Command {
    const char* name;
    const char* help;
    std::size_t files;
    Handler handler;
  };
  const std::vector<Command> commands = {
      {"eig", "eigenvalues with multiplicities", 1, cmd_eig},
      {"jordan", "complex Jordan structure", 1, cmd_jordan},
      {"real-jordan", "real Jordan structure", 1, cmd_real_jordan},
      {"check-log", "decide whether a real logarithm exists", 1,
       [](const Options& o, Report& r) { return cmd_check(o, r, false); }},
      {"check-sqrt", "decide whether a real square root exists", 1,
       [](const Options& o, Report& r) { return cmd_check(o, r, true); }},
      {"log", "real logarithm", 1, cmd_log},
      {"sqrt", "real square root", 1, cmd_sqrt},
      {"root", "principal p-th root", 1, cmd_root},
      {"exp", "matrix exponential", 1, cmd_exp},
      {"iss-log", "logarithm by inverse scaling and squaring", 1, cmd_iss_log},
      {"verify", "residual of X as log / sqrt / root of A", 2, cmd_verify},
  };

  std::map<CLI::App*, const Command*> by_app;
  for (const auto& cmd : commands) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    sub->add_option("--tol-cluster", opt.tol_cluster, "eigenvalue clustering radius");
    sub->add_option("--tol-rank", opt.tol_rank, "singular-value zero threshold");
    sub->add_option("--tol-residual", opt.tol_residual, "acceptance residual")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--branch", opt.branch, "principal | any")
        ->check(CLI::IsMember({"principal", "any"}));
    sub->add_option("-p", opt.p, "root order")->check(CLI::Range(2u, 1000u));
    sub->add_option("--format", opt.format, "text | json")->check(CLI::IsMember({"text", "json"}));
    sub->add_option("-o,--output", opt.output, "write the result matrix to this file");
    if (std::string(cmd.name) == "verify")
      sub->add_option("--kind", opt.kind, "log | sqrt | root")->required();
    sub->add_option("files", opt.files, "matrix file(s)")->required();
    by_app[sub] = &cmd;
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  }

  const Command* chosen = nullptr;
  for (CLI::App* sub : app.get_subcommands()) chosen = by_app.at(sub);
  opt.p_given = app.get_subcommands().front()->count("-p") > 0;

  Report report;
  report.command = chosen->name;
  report.args = args;
  const auto start = std::chrono::steady_clock::now();
  auto fail = [&](int code, const std::string& msg) {
    if (opt.format == "json") {
      out << json{{"command", report.command}, {"error", msg}, {"exit_code", code}}.dump() << '\n';
    }
    err << "matfn " << report.command << ": error: " << msg << '\n';
    return code;
  };
  try {
    if (opt.tol_cluster && *opt.tol_cluster < 0) throw UsageError("--tol-cluster must be >= 0");
    if (opt.tol_rank && *opt.tol_rank < 0) throw UsageError("--tol-rank must be >= 0");
    require_files(opt, chosen->files);
    const int code = chosen->handler(opt, report);
    report.time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    emit(report, opt, out, err);
    return code;
  } catch (const UsageError& e) {
    return fail(kUsage, e.what());
  } catch (const io::IoError& e) {
    return fail(kUsage, e.what());
  } catch (const PreconditionError& e) {
    return fail(kPrecondition, e.what());
  } catch (const NumericalError& e) {
    return fail(kNumerical, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(kUsage, e.what());
  }
}

}  // namespace matfn::cli

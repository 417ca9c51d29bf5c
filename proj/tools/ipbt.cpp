// ipbt: exact solvers and refinement checks for informed-principal bilateral trade.
//
//   ipbt solve {rsw|full-info|ex-ante|efficient} ENV [--weights w1,w2,...] [--seller-iir]
//   ipbt check {feasible|core|strong-solution|fgp|snp} ENV [--alloc FILE]
//   ipbt report ENV [--csv-dir DIR]
//
// Common flags: --out FILE, --timing. TOOLKIT_PIVOT_LIMIT overrides the pivot ceiling.
// Exit codes: 0 ok, 2 input error, 3 verification failure, 4 precondition failure.

#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "ipbt/errors.hpp"
#include "ipbt/io.hpp"
#include "ipbt/report.hpp"

namespace {

struct Args {
  std::string kind;
  std::string env_file;
  std::string alloc_file;
  std::string out_file;
  std::string weights;
  std::string csv_dir;
  bool seller_iir = false;
  bool timing = false;
};

std::optional<std::int64_t> pivot_limit_from_env() {
  const char* raw = std::getenv("TOOLKIT_PIVOT_LIMIT");
  if (!raw || !*raw) return std::nullopt;
  char* end = nullptr;
  const long long v = std::strtoll(raw, &end, 10);
  if (*end != '\0' || v <= 0) {
    throw ipbt::InputError("InvalidPivotLimit", "TOOLKIT_PIVOT_LIMIT must be a positive integer");
  }
  return v;
}

void emit(const ipbt::RunReport& report, const std::string& out_file) {
  const std::string text = ipbt::io::canonical_dump(report.to_json());
  if (out_file.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out_file);
  if (!f) throw ipbt::InputError("OutputError", "cannot write " + out_file);
  f << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact solvers for informed-principal bilateral trade"};
  app.require_subcommand(1);
  Args a;

  auto common = [&](CLI::App* sub) {
    sub->add_option("env", a.env_file, "Environment JSON file")->required();
    sub->add_option("--out", a.out_file, "Write the report here instead of stdout");
    sub->add_flag("--timing", a.timing, "Include wall-clock seconds in the report");
  };

  auto* solve = app.add_subcommand("solve", "Compute an allocation");
  solve->add_option("kind", a.kind, "rsw | full-info | ex-ante | efficient")
      ->required()
      ->check(CLI::IsMember({"rsw", "full-info", "ex-ante", "efficient"}));
  common(solve);
  solve->add_option("--weights", a.weights, "Weighted relaxed-problem cross-check, e.g. 1,2");
  solve->add_flag("--seller-iir", a.seller_iir, "Ex-ante problem with seller participation");

  auto* check = app.add_subcommand("check", "Decide a solution concept");
  check->add_option("kind", a.kind, "feasible | core | strong-solution | fgp | snp")
      ->required()
      ->check(CLI::IsMember({"feasible", "core", "strong-solution", "fgp", "snp"}));
  common(check);
  check->add_option("--alloc", a.alloc_file, "Allocation JSON file");

  auto* report = app.add_subcommand("report", "Consolidated comparison report");
  common(report);
  report->add_option("--csv-dir", a.csv_dir, "Directory for plot CSV files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ipbt::kExitInput;
  }

  try {
    ipbt::RunOptions options;
    options.lp.pivot_limit = pivot_limit_from_env();
    options.seller_iir = a.seller_iir;
    options.timing = a.timing;
    if (!a.weights.empty()) options.weights = ipbt::parse_weights(a.weights);
    if (!a.csv_dir.empty()) options.csv_dir = a.csv_dir;

    const auto env = ipbt::io::load_environment(a.env_file);
    ipbt::RunReport out;
    if (solve->parsed()) {
      out = ipbt::cmd_solve(a.kind, env, options);
    } else if (check->parsed()) {
      std::optional<ipbt::Allocation> alloc;
      if (!a.alloc_file.empty()) alloc = ipbt::io::load_allocation(env, a.alloc_file);
      out = ipbt::cmd_check(a.kind, env, alloc, options);
    } else {
      out = ipbt::cmd_report(env, options);
    }
    emit(out, a.out_file);
    if (!out.verified()) {
      std::cerr << "ipbt: verification failed\n";
      return ipbt::kExitVerification;
    }
    return ipbt::kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "ipbt: " << e.what() << '\n';
    return ipbt::exit_code_for(e);
  }
}

// Command-line front end: `dynkc run` replays a stream file and emits
// per-step reports; `dynkc gen` produces synthetic streams.
//
// Exit codes: 0 success, 2 parse error, 3 precondition violation,
// 4 guarantee violation found by --verify.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dynkc/dynkc.hpp"

namespace {

int run_command(const std::string& stream_path, const std::string& report_path,
                bool verify, const std::string& oracle_name, int audit_every) {
  dynkc::RunOptions options;
  options.verify = verify;
  options.audit_every = audit_every;
  if (oracle_name == "exact") {
    options.oracle = dynkc::OracleMode::Exact;
  } else if (oracle_name == "gonzalez") {
    options.oracle = dynkc::OracleMode::Gonzalez;
  } else if (oracle_name == "none") {
    options.oracle = dynkc::OracleMode::None;
  } else {
    std::cerr << "unknown oracle \"" << oracle_name << "\"\n";
    return 3;
  }

  std::ifstream file_in;
  std::istream* in = &std::cin;
  if (stream_path != "-") {
    file_in.open(stream_path);
    if (!file_in) {
      std::cerr << "cannot open stream file " << stream_path << '\n';
      return 3;
    }
    in = &file_in;
  }
  std::ofstream file_out;
  std::ostream* out = &std::cout;
  if (!report_path.empty() && report_path != "-") {
    file_out.open(report_path);
    if (!file_out) {
      std::cerr << "cannot open report file " << report_path << '\n';
      return 3;
    }
    out = &file_out;
  }
  return dynkc::run_stream(*in, *out, std::cerr, options);
}

int gen_command(std::uint64_t n, int k, std::int64_t delta,
                const std::string& mode_name, std::uint64_t seed,
                const std::string& out_path) {
  const std::optional<dynkc::GenMode> mode = dynkc::gen_mode_from_string(mode_name);
  if (!mode) {
    std::cerr << "unknown mode \"" << mode_name << "\"\n";
    return 3;
  }
  dynkc::GenOptions options;
  options.n = n;
  options.k = k;
  options.delta = delta;
  options.mode = *mode;
  options.seed = seed;
  dynkc::Stream stream;
  try {
    stream = dynkc::generate_stream(options);
  } catch (const dynkc::Error& e) {
    std::cerr << "generation error: " << e.what() << '\n';
    return 3;
  }
  if (out_path.empty() || out_path == "-") {
    dynkc::serialize_stream(stream, std::cout);
    return 0;
  }
  std::ofstream out(out_path);
  if (!out) {
    std::cerr << "cannot open output file " << out_path << '\n';
    return 3;
  }
  dynkc::serialize_stream(stream, out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic consistent k-center clustering harness"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Replay an update stream");
  std::string stream_path = "-";
  std::string report_path;
  std::string oracle_name = "none";
  bool verify = false;
  int audit_every = 1;
  run->add_option("--stream", stream_path, "Stream file (JSON Lines, - for stdin)");
  run->add_option("--report", report_path, "Report file (default stdout)");
  run->add_flag("--verify", verify, "Audit every guarantee and fail on violations");
  run->add_option("--oracle", oracle_name, "Ratio oracle: exact, gonzalez, or none");
  run->add_option("--audit-every", audit_every, "Audit every Nth step (default 1)");

  auto* gen = app.add_subcommand("gen", "Generate a synthetic stream");
  std::uint64_t n = 10;
  int k = 1;
  std::int64_t delta = 8;
  std::string mode_name = "random";
  std::uint64_t seed = 0;
  std::string out_path;
  gen->add_option("--n", n, "Number of events");
  gen->add_option("--k", k, "Number of centers to maintain");
  gen->add_option("--delta", delta, "Diameter bound");
  gen->add_option("--mode", mode_name,
                  "insert-only, sliding-window, adversarial-cycle, or random");
  gen->add_option("--seed", seed, "RNG seed");
  gen->add_option("--out", out_path, "Output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return run_command(stream_path, report_path, verify, oracle_name, audit_every);
    }
    return gen_command(n, k, delta, mode_name, seed, out_path);
  } catch (const dynkc::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 2;
  } catch (const dynkc::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << '\n';
    return 1;
  }
}

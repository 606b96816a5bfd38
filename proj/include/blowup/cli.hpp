#pragma once

#include "blowup/checks.hpp"
#include "blowup/enumerate.hpp"
#include "blowup/io.hpp"
#include "blowup/parallel.hpp"
#include "blowup/repl.hpp"
#include "blowup/state.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace blowup {

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitUsage = 2 };

namespace detail {

struct CliStreams {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
};

/// Exit-code carrying failure raised inside a subcommand.
struct CliExit {
  int code;
  std::string message;
};

inline BlowupState load_input(const std::string& path, CliStreams& io) {
  try {
    if (path.empty() || path == "-") return read_state_file(io.in);
    std::ifstream f(path);
    if (!f) throw CliExit{kExitUsage, "cannot open '" + path + "'"};
    return read_state_file(f);
  } catch (const LoadError& e) {
    throw CliExit{e.kind() == LoadError::Kind::malformed ? kExitUsage : kExitFailure, e.what()};
  }
}

/// Writes a state after confirming the total determinant is still -1.
inline void store_output(const BlowupState& state, const std::string& path, CliStreams& io) {
  if (state.total_det() != -1 || det_fast(state.forest()) != -1)
    throw CliExit{kExitFailure, "refusing to write: total determinant is " + to_string(det_fast(state.forest())) +
                                    ", expected -1"};
  if (path.empty() || path == "-") {
    write_state_file(io.out, state);
    return;
  }
  std::ofstream f(path);
  if (!f) throw CliExit{kExitUsage, "cannot open '" + path + "' for writing"};
  write_state_file(f, state);
  if (!f) throw CliExit{kExitFailure, "write to '" + path + "' failed"};
}

}  // namespace detail

/// Entry point of the `blowup` tool. `args` excludes the program name.
/// Returns 0 on success, 1 on a failed check or verification, 2 on a usage
/// error or malformed input.
inline int cli_main(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  detail::CliStreams io{in, out, err};
  CLI::App app{"Blow-up calculus engine for weighted trees of exceptional curves", "blowup"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Print help for every subcommand");

  std::string in_path, out_path;
  auto add_in = [&](CLI::App* sub) { sub->add_option("--in,-i", in_path, "State file to read (default stdin)"); };
  auto add_out = [&](CLI::App* sub) { sub->add_option("--out,-o", out_path, "State file to write (default stdout)"); };
  std::size_t threads = default_thread_count();
  auto add_threads = [&](CLI::App* sub) {
    sub->add_option("--threads,-j", threads, std::string("Worker threads (default from ") + kThreadsEnv + ")")
        ->check(CLI::PositiveNumber);
  };

  auto* new_cmd = app.add_subcommand("new", "Write the seed state (the line at infinity)");
  add_out(new_cmd);

  auto* op_cmd = app.add_subcommand("op", "Apply one blow-up to a state file");
  op_cmd->require_subcommand(1);
  add_in(op_cmd);
  add_out(op_cmd);
  std::uint32_t op_vertex = 0, op_p = 0, op_q = 0;
  auto* op_vertex_cmd = op_cmd->add_subcommand("vertex", "Blow up a free point on a curve");
  op_vertex_cmd->add_option("id", op_vertex, "Vertex id")->required();
  auto* op_edge_cmd = op_cmd->add_subcommand("edge", "Blow up the intersection of two adjacent curves");
  op_edge_cmd->add_option("p", op_p, "First vertex id")->required();
  op_edge_cmd->add_option("q", op_q, "Second vertex id")->required();

  auto* labels_cmd = app.add_subcommand("labels", "Print the label table of a state file");
  add_in(labels_cmd);

  auto* verify_cmd = app.add_subcommand("verify", "Run a property check over random histories");
  std::string check_name;
  std::uint64_t seed = 1;
  std::size_t trials = 1000, depth = 12;
  bool no_time = false;
  verify_cmd->add_option("check", check_name, "Check name, 'worked_examples' or 'all'")->required();
  verify_cmd->add_option("--seed", seed, "Base seed");
  verify_cmd->add_option("--trials", trials, "Sampled histories per check");
  verify_cmd->add_option("--depth", depth, "Maximum history length");
  verify_cmd->add_flag("--no-time", no_time, "Leave wall times out of the report");
  add_threads(verify_cmd);

  auto* disc_cmd = app.add_subcommand("discriminate-5-9", "Test both pair-determinant formulas against the oracle");
  std::size_t disc_depth = 4, disc_samples = 200;
  std::uint64_t disc_seed = 1;
  disc_cmd->add_option("--depth", disc_depth, "Exhaustive history depth");
  disc_cmd->add_option("--seed", disc_seed, "Seed for the sampled deeper histories");
  disc_cmd->add_option("--samples", disc_samples, "Number of sampled deeper histories");

  auto* enum_cmd = app.add_subcommand("enumerate", "List canonical blow-up trees by depth");
  std::size_t enum_depth = 0;
  std::string filter_text;
  std::size_t max_frontier = 0;
  bool count_only = false;
  enum_cmd->add_option("--depth", enum_depth, "Maximum number of blow-ups")->required();
  enum_cmd->add_option("--filter", filter_text, "Label filter, e.g. 'some dP==-1 & all u<=3'");
  enum_cmd->add_option("--max-frontier", max_frontier, "Abort when one depth exceeds this many classes");
  enum_cmd->add_flag("--count", count_only, "Print only the per-depth counts");
  add_threads(enum_cmd);

  auto* census_cmd = app.add_subcommand("census", "Count trees with a vertex carrying given dP and K-bar labels");
  std::string census_a, census_b;
  std::size_t census_depth = 0, census_witnesses = 5;
  census_cmd->add_option("--a", census_a, "Determinant label dP")->required();
  census_cmd->add_option("--b", census_b, "K-bar label b")->required();
  census_cmd->add_option("--depth", census_depth, "Maximum number of blow-ups")->required();
  census_cmd->add_option("--witnesses", census_witnesses, "Witness histories to print");
  add_threads(census_cmd);

  auto* export_cmd = app.add_subcommand("export", "Export a state as a graph or as JSON");
  std::string format;
  export_cmd->add_option("--format", format, "graph or json")->required()->check(CLI::IsMember({"graph", "json"}));
  add_in(export_cmd);

  auto* repl_cmd = app.add_subcommand("repl", "Interactive session");
  std::string repl_load;
  bool prompt = false;
  repl_cmd->add_option("--load", repl_load, "Start from this state file");
  repl_cmd->add_flag("--prompt", prompt, "Print a prompt before each command");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    err << "run with --help for usage\n";
    return kExitUsage;
  }

  try {
    if (*new_cmd) {
      detail::store_output(seed_p2(), out_path, io);
    } else if (*op_cmd) {
      const BlowupState state = detail::load_input(in_path, io);
      BlowupState next = state;
      try {
        next = *op_vertex_cmd ? blow_up_vertex(state, VertexId{op_vertex})
                              : blow_up_edge(state, VertexId{op_p}, VertexId{op_q});
      } catch (const Error& e) {
        throw detail::CliExit{kExitUsage, e.what()};
      }
      detail::store_output(next, out_path, io);
    } else if (*labels_cmd) {
      out << format_label_table(detail::load_input(in_path, io));
    } else if (*verify_cmd) {
      HistorySampler sampler;
      sampler.seed = seed;
      sampler.max_depth = depth;
      std::vector<CheckReport> reports;
      if (check_name == "all" || check_name == "worked_examples") reports.push_back(verify_worked_examples());
      if (check_name == "all") {
        for (const auto& def : check_registry()) reports.push_back(run_check(def.name, sampler, trials, threads));
      } else if (check_name != "worked_examples") {
        if (!find_check(check_name))
          throw detail::CliExit{kExitUsage, "unknown check '" + check_name + "'; known checks: worked_examples, " +
                                                registry_names() + ", all"};
        reports.push_back(run_check(check_name, sampler, trials, threads));
      }
      bool ok = true;
      for (const auto& r : reports) {
        out << format_check_report(r, !no_time);
        ok &= r.passed();
      }
      out << (ok ? "all checks passed" : "some checks FAILED") << '\n';
      return ok ? kExitOk : kExitFailure;
    } else if (*disc_cmd) {
      const auto report = discriminate_pair_formula(disc_depth, disc_seed, disc_samples);
      out << format_pair_report(report);
      return report.verdict == PairFormulaVerdict::squared_form ? kExitOk : kExitFailure;
    } else if (*enum_cmd) {
      EnumerationOptions options;
      options.max_depth = enum_depth;
      options.threads = threads;
      if (max_frontier > 0) options.max_frontier = max_frontier;
      try {
        if (!filter_text.empty()) options.filter = FilterSpec::parse(filter_text);
      } catch (const Error& e) {
        throw detail::CliExit{kExitUsage, e.what()};
      }
      EnumerationSummary summary;
      try {
        summary = enumerate_states(options, [&](const EnumeratedClass& c) {
          if (!count_only) out << format_class_line(c) << '\n';
        });
      } catch (const FrontierLimitError& e) {
        throw detail::CliExit{kExitFailure, e.what()};
      }
      out << "classes per depth:";
      for (std::size_t d = 0; d < summary.classes_per_depth.size(); ++d)
        out << ' ' << d << ':' << summary.classes_per_depth[d];
      out << "\nmatching classes: " << summary.emitted << '\n';
    } else if (*census_cmd) {
      const auto a = parse_integer(census_a);
      const auto b = parse_integer(census_b);
      if (!a || !b) throw detail::CliExit{kExitUsage, "--a and --b take integers"};
      out << format_census_report(census(*a, *b, census_depth, threads, census_witnesses));
    } else if (*export_cmd) {
      const BlowupState state = detail::load_input(in_path, io);
      if (format == "graph")
        out << export_graph(state);
      else
        out << export_json(state).dump(2) << '\n';
    } else if (*repl_cmd) {
      Repl repl(repl_load.empty() ? seed_p2() : detail::load_input(repl_load, io));
      repl.run(in, out, prompt);
    }
  } catch (const detail::CliExit& e) {
    err << "error: " << e.message << '\n';
    return e.code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace blowup

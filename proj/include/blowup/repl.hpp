#pragma once

#include "blowup/error.hpp"
#include "blowup/history.hpp"
#include "blowup/io.hpp"
#include "blowup/state.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace blowup {

inline constexpr const char* kReplHelp =
    "commands:\n"
    "  v <id>          blow up a free point on vertex <id>\n"
    "  e <p> <q>       blow up the intersection of adjacent vertices <p> and <q>\n"
    "  undo            blow down the most recent vertex\n"
    "  labels          print the label table\n"
    "  final <id>      is <id> final, by structure and by K-bar labels\n"
    "  anc <id>        ancestors of <id>\n"
    "  history         print the op history\n"
    "  save <path>     write a state file\n"
    "  load <path>     read a state file\n"
    "  new             start over from the seed\n"
    "  help            this text\n"
    "  quit            leave\n";

/// Line-driven session over one state. A failing command prints "error: ..."
/// and leaves the state untouched.
class Repl {
 public:
  explicit Repl(BlowupState state = seed_p2()) : state_(std::move(state)) {}

  const BlowupState& state() const { return state_; }

  /// Executes one command line. Returns false on quit.
  bool execute(const std::string& line, std::ostream& out) {
    std::istringstream in(line);
    std::vector<std::string> args;
    for (std::string tok; in >> tok;) args.push_back(tok);
    if (args.empty() || args[0][0] == '#') return true;
    const std::string cmd = args[0];
    try {
      if (cmd == "quit" || cmd == "exit") return false;
      if (cmd == "help") {
        out << kReplHelp;
      } else if (cmd == "v") {
        arity(args, 2);
        mutate(blow_up_vertex(state_, id(args[1])), out);
      } else if (cmd == "e") {
        arity(args, 3);
        mutate(blow_up_edge(state_, id(args[1]), id(args[2])), out);
      } else if (cmd == "undo") {
        arity(args, 1);
        mutate(blow_down(state_), out);
      } else if (cmd == "new") {
        arity(args, 1);
        mutate(seed_p2(), out);
      } else if (cmd == "labels") {
        arity(args, 1);
        out << format_label_table(state_);
      } else if (cmd == "final") {
        arity(args, 2);
        const VertexId v = id(args[1]);
        const bool final = is_final(state_, v);
        const auto by_labels = final_by_labels(state_, v);
        out << "vertex " << v << ": " << (final ? "final" : "not final");
        out << "; by K-bar labels: " << (by_labels ? (*by_labels ? "final" : "not final") : "undetermined") << '\n';
      } else if (cmd == "anc") {
        arity(args, 2);
        const VertexId v = id(args[1]);
        const auto anc = ancestors(state_, v);
        out << "ancestors of " << v << ":";
        if (anc.empty()) out << " none";
        for (VertexId a : anc) out << ' ' << a;
        out << '\n';
      } else if (cmd == "history") {
        arity(args, 1);
        auto ops = state_.ops();
        out << format_history(ops) << '\n';
      } else if (cmd == "save") {
        arity(args, 2);
        std::ofstream f(args[1]);
        if (!f) throw Error("cannot open '" + args[1] + "' for writing");
        write_state_file(f, state_);
        if (!f) throw Error("write to '" + args[1] + "' failed");
        out << "saved " << args[1] << '\n';
      } else if (cmd == "load") {
        arity(args, 2);
        std::ifstream f(args[1]);
        if (!f) throw Error("cannot open '" + args[1] + "'");
        mutate(read_state_file(f), out);
      } else {
        throw Error("unknown command '" + cmd + "' (try help)");
      }
    } catch (const std::exception& e) {
      out << "error: " << e.what() << '\n';
    }
    return true;
  }

  void run(std::istream& in, std::ostream& out, bool prompt = false) {
    std::string line;
    if (prompt) out << "> " << std::flush;
    while (std::getline(in, line)) {
      if (!execute(line, out)) return;
      if (prompt) out << "> " << std::flush;
    }
  }

 private:
  static void arity(const std::vector<std::string>& args, std::size_t n) {
    if (args.size() != n)
      throw Error("'" + args[0] + "' takes " + std::to_string(n - 1) + " argument" + (n == 2 ? "" : "s"));
  }

  static VertexId id(const std::string& text) { return detail::parse_vertex_id(text, "command"); }

  void mutate(BlowupState next, std::ostream& out) {
    state_ = std::move(next);
    out << format_label_table(state_);
  }

  BlowupState state_;
};

}  // namespace blowup

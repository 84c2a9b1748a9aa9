#pragma once

#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "aex/emit.hpp"
#include "aex/errors.hpp"
#include "aex/pb2cnf.hpp"
#include "aex/solver.hpp"

namespace aex {

enum class ProofFormat { Auto, Cnf, Opb };

namespace detail {

inline std::string run_command(const std::string& cmd) {
  FILE* pipe = popen((cmd + " 2>/dev/null").c_str(), "r");
  if (!pipe) throw BridgeError("failed to start external solver: " + cmd);
  std::string out;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) out.append(buf, n);
  pclose(pipe);
  return out;
}

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& suffix) {
    auto dir = std::filesystem::temp_directory_path();
    char tmpl[4096];
    std::snprintf(tmpl, sizeof(tmpl), "%s/aexXXXXXX", dir.c_str());
    int fd = mkstemp(tmpl);
    if (fd < 0) throw BridgeError("cannot create temp file");
    close(fd);
    std::filesystem::rename(tmpl, std::string(tmpl) + suffix);
    path = std::string(tmpl) + suffix;
  }
  ~TempFile() {
    std::error_code ec;
    std::filesystem::remove(path, ec);
  }
};

}  // namespace detail

// Runs `command <file>` on the formula (CNF when clause-only or forced,
// OPB otherwise), parses the "s "/"v " answer lines, and re-verifies any
// claimed model against the original formula. Unsat answers are taken on
// trust. Protocol violations and false models raise BridgeError.
inline SolveResult solve_external(const Formula& f, const std::string& command,
                                  ProofFormat format = ProofFormat::Auto) {
  const bool as_cnf =
      format == ProofFormat::Cnf || (format == ProofFormat::Auto && f.pbs.empty());
  detail::TempFile tmp(as_cnf ? ".cnf" : ".opb");
  {
    std::ofstream os(tmp.path);
    if (!os) throw BridgeError("cannot write " + tmp.path);
    if (as_cnf) {
      if (f.pbs.empty()) {
        emit_dimacs(f, os);
      } else {
        Formula translated = f;
        translate_pbs(translated);
        emit_dimacs(translated, os);
      }
    } else {
      emit_opb(f, os);
    }
  }

  const std::string out = detail::run_command(command + " " + tmp.path);

  SolveResult res;
  res.model.assign(static_cast<size_t>(f.vars.count()) + 1, 0);
  bool have_status = false;
  std::istringstream is(out);
  std::string line;
  while (std::getline(is, line)) {
    if (line.rfind("s ", 0) == 0) {
      std::string s = line.substr(2);
      while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
      if (s == "SATISFIABLE") res.status = SolveStatus::Sat;
      else if (s == "UNSATISFIABLE") res.status = SolveStatus::Unsat;
      else if (s == "UNKNOWN") res.status = SolveStatus::ResourceOut;
      else throw BridgeError("external solver: unrecognized status '" + s + "'");
      have_status = true;
    } else if (line.rfind("v ", 0) == 0) {
      std::istringstream ls(line.substr(2));
      std::string tok;
      while (ls >> tok) {
        bool neg = false;
        size_t p = 0;
        if (tok[p] == '-') {
          neg = true;
          ++p;
        }
        if (p < tok.size() && (tok[p] == 'x' || tok[p] == '~')) {
          if (tok[p] == '~') {
            neg = true;
            ++p;
          }
          if (p < tok.size() && tok[p] == 'x') ++p;
        }
        if (p >= tok.size()) continue;
        int var;
        try {
          var = std::stoi(tok.substr(p));
        } catch (...) {
          throw BridgeError("external solver: bad value token '" + tok + "'");
        }
        if (var == 0) continue;
        if (var < 0) {
          neg = true;
          var = -var;
        }
        if (static_cast<size_t>(var) < res.model.size())
          res.model[static_cast<size_t>(var)] = neg ? 0 : 1;
      }
    }
  }
  if (!have_status)
    throw BridgeError("external solver produced no status line");
  if (res.status == SolveStatus::Sat && !check_model(f, res.model))
    throw BridgeError("external solver model fails re-verification");
  return res;
}

}  // namespace aex

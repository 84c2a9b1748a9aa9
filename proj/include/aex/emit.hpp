#pragma once

#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "aex/errors.hpp"
#include "aex/formula.hpp"

namespace aex {

// DIMACS CNF. The formula must be clause-only (translate PBs first).
inline void emit_dimacs(const Formula& f, std::ostream& os) {
  if (!f.pbs.empty())
    throw EncodingError("formula holds PB constraints; translate before CNF emission");
  os << "p cnf " << f.vars.count() << " " << f.clauses.size() << "\n";
  for (const auto& c : f.clauses) {
    for (const auto& l : c) os << l.dimacs() << " ";
    os << "0\n";
  }
}

// OPB text; <= constraints are emitted as >= with negated coefficients.
inline void emit_opb(const Formula& f, std::ostream& os) {
  os << "* #variable= " << f.vars.count() << " #constraint= "
     << (f.clauses.size() + f.pbs.size()) << "\n";
  auto term = [&os](int64_t coef, const Lit& l) {
    os << (coef >= 0 ? "+" : "") << coef << " " << (l.pos ? "x" : "~x") << l.var << " ";
  };
  for (const auto& c : f.clauses) {
    for (const auto& l : c) term(1, l);
    os << ">= 1 ;\n";
  }
  for (const auto& pb : f.pbs) {
    const bool flip = pb.rel == PbRel::Le;
    for (const auto& t : pb.terms) term(flip ? -t.coef : t.coef, t.lit);
    os << (pb.rel == PbRel::Eq ? "= " : ">= ") << (flip ? -pb.bound : pb.bound) << " ;\n";
  }
}

inline std::string to_dimacs(const Formula& f) {
  std::ostringstream os;
  emit_dimacs(f, os);
  return os.str();
}

inline std::string to_opb(const Formula& f) {
  std::ostringstream os;
  emit_opb(f, os);
  return os.str();
}

inline Formula parse_dimacs(std::istream& is) {
  Formula f;
  std::string line;
  int line_no = 0;
  long declared_vars = -1, declared_clauses = -1;
  Clause cur;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == 'c') continue;
    if (line[0] == 'p') {
      std::istringstream ls(line);
      std::string p, fmt;
      if (!(ls >> p >> fmt >> declared_vars >> declared_clauses) || fmt != "cnf")
        throw ParseError("bad problem line", line_no);
      continue;
    }
    std::istringstream ls(line);
    long v;
    while (ls >> v) {
      if (v == 0) {
        f.clauses.push_back(cur);
        cur.clear();
      } else {
        if (v > declared_vars || -v > declared_vars)
          throw ParseError("literal exceeds declared variable count", line_no);
        cur.push_back(v > 0 ? pos_lit(static_cast<int>(v)) : neg_lit(static_cast<int>(-v)));
      }
    }
    if (!ls.eof()) throw ParseError("bad literal", line_no);
  }
  if (!cur.empty()) throw ParseError("clause without terminating 0", line_no);
  if (declared_vars < 0) throw ParseError("missing problem line", line_no);
  if (declared_clauses >= 0 && static_cast<long>(f.clauses.size()) != declared_clauses)
    throw ParseError("clause count mismatch: declared " + std::to_string(declared_clauses) +
                         ", found " + std::to_string(f.clauses.size()),
                     line_no);
  while (f.vars.count() < declared_vars) f.vars.fresh();
  return f;
}

inline Formula parse_opb(std::istream& is) {
  Formula f;
  std::string line;
  int line_no = 0;
  int max_var = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const bool saw_semi = line.find(';') != std::string::npos;
    std::string stripped;
    for (char c : line) {
      if (c == ';') break;
      stripped += c;
    }
    bool blank = true;
    for (char c : stripped)
      if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
    if (blank || (!stripped.empty() && stripped[0] == '*')) continue;

    std::istringstream ls(stripped);
    PbConstraint pb;
    std::string tok;
    bool have_rel = false;
    while (ls >> tok) {
      if (tok == ">=" || tok == "=" || tok == "<=") {
        pb.rel = tok == ">=" ? PbRel::Ge : tok == "=" ? PbRel::Eq : PbRel::Le;
        if (!(ls >> pb.bound)) throw ParseError("missing bound", line_no);
        have_rel = true;
        break;
      }
      int64_t coef;
      try {
        coef = std::stoll(tok);
      } catch (...) {
        throw ParseError("bad coefficient '" + tok + "'", line_no);
      }
      std::string vt;
      if (!(ls >> vt)) throw ParseError("coefficient without literal", line_no);
      bool neg = false;
      size_t p = 0;
      if (vt[p] == '~') {
        neg = true;
        ++p;
      }
      if (p >= vt.size() || vt[p] != 'x') throw ParseError("bad literal '" + vt + "'", line_no);
      int var;
      try {
        var = std::stoi(vt.substr(p + 1));
      } catch (...) {
        throw ParseError("bad literal '" + vt + "'", line_no);
      }
      if (var <= 0) throw ParseError("bad variable index", line_no);
      max_var = std::max(max_var, var);
      pb.terms.push_back({coef, Lit(var, !neg)});
    }
    if (!have_rel) {
      if (pb.terms.empty()) continue;
      throw ParseError("constraint without relation", line_no);
    }
    std::string rest;
    if (ls >> rest) throw ParseError("trailing tokens after bound", line_no);
    if (!saw_semi) throw ParseError("constraint without terminating ';'", line_no);
    f.pbs.push_back(std::move(pb));
  }
  while (f.vars.count() < max_var) f.vars.fresh();
  return f;
}

}  // namespace aex

#pragma once

// MPS and LP-style text export, plus an MPS reader for round trips.
//
// The MPS writer keeps the fixed-format section layout and field order but
// separates fields by whitespace, since generated names are longer than the
// classic 8 characters. Every mainstream solver reads this as free MPS.
// Numbers are printed with the shortest representation that parses back to
// the same double, so export(import(export(m))) == export(m) byte for byte.

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "regenpool/errors.hpp"
#include "regenpool/milp/model.hpp"

namespace regenpool::milp {

namespace detail {

inline std::string num(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_num(std::string_view s, std::size_t line) {
  double v = 0.0;
  if (s == "Inf" || s == "inf" || s == "+Inf" || s == "+inf" || s == "1e30" || s == "1e+30") return kInf;
  if (s == "-Inf" || s == "-inf" || s == "-1e30" || s == "-1e+30") return -kInf;
  const char* b = s.data();
  if (!s.empty() && s.front() == '+') ++b;
  auto res = std::from_chars(b, s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw ParseError("bad number '" + std::string(s) + "'", line);
  return v;
}

inline std::vector<std::string_view> fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t k = 0;
  while (k < line.size()) {
    while (k < line.size() && (line[k] == ' ' || line[k] == '\t')) ++k;
    std::size_t e = k;
    while (e < line.size() && line[e] != ' ' && line[e] != '\t') ++e;
    if (e > k) out.push_back(line.substr(k, e - k));
    k = e;
  }
  return out;
}

inline constexpr std::string_view kObjRow = "OBJ";

}  // namespace detail

inline std::string write_mps(const Model& m) {
  const int n = m.variable_count();
  std::vector<std::vector<std::pair<int, double>>> cols(static_cast<std::size_t>(n));
  for (int i = 0; i < m.constraint_count(); ++i)
    for (const Term& t : m.constraint(i).terms) cols[t.var].push_back({i, t.coef});

  std::string out;
  out.reserve(64 * static_cast<std::size_t>(n + m.constraint_count()));
  out += "NAME          " + m.name() + "\n";
  out += "OBJSENSE\n";
  out += m.sense() == ObjSense::maximize ? "    MAX\n" : "    MIN\n";
  out += "ROWS\n";
  out += " N  " + std::string(detail::kObjRow) + "\n";
  for (const auto& r : m.constraints()) {
    out += r.sense == RowSense::le ? " L  " : r.sense == RowSense::ge ? " G  " : " E  ";
    out += r.name + "\n";
  }

  out += "COLUMNS\n";
  bool in_int = false;
  int marker = 0;
  for (int j = 0; j < n; ++j) {
    const Variable& v = m.variable(j);
    if (v.integral() != in_int) {
      out += "    MARKER" + std::to_string(marker++) + "  'MARKER'  " + (v.integral() ? "'INTORG'\n" : "'INTEND'\n");
      in_int = v.integral();
    }
    const double c = m.objective()[j];
    if (c != 0.0 || cols[j].empty()) out += "    " + v.name + "  " + std::string(detail::kObjRow) + "  " + detail::num(c) + "\n";
    for (const auto& [i, a] : cols[j]) out += "    " + v.name + "  " + m.constraint(i).name + "  " + detail::num(a) + "\n";
  }
  if (in_int) out += "    MARKER" + std::to_string(marker++) + "  'MARKER'  'INTEND'\n";

  out += "RHS\n";
  for (const auto& r : m.constraints())
    if (r.rhs != 0.0) out += "    RHS  " + r.name + "  " + detail::num(r.rhs) + "\n";

  out += "BOUNDS\n";
  for (const Variable& v : m.variables()) {
    const std::string& nm = v.name;
    if (v.kind == VarKind::binary && v.lower == 0.0 && v.upper == 1.0) {
      out += " BV BND  " + nm + "\n";
    } else if (v.lower == v.upper) {
      out += " FX BND  " + nm + "  " + detail::num(v.lower) + "\n";
    } else if (v.integral()) {
      out += " LO BND  " + nm + "  " + detail::num(v.lower) + "\n";
      out += " UP BND  " + nm + "  " + detail::num(v.upper) + "\n";
    } else if (v.lower == -kInf && v.upper == kInf) {
      out += " FR BND  " + nm + "\n";
    } else {
      if (v.lower == -kInf) out += " MI BND  " + nm + "\n";
      else if (v.lower != 0.0 || v.upper < 0.0) out += " LO BND  " + nm + "  " + detail::num(v.lower) + "\n";
      if (v.upper != kInf) out += " UP BND  " + nm + "  " + detail::num(v.upper) + "\n";
    }
  }
  out += "ENDATA\n";
  return out;
}

inline Model read_mps(std::string_view text) {
  Model m;
  std::unordered_map<std::string, int> row_index;
  std::vector<RowSense> senses;
  std::vector<std::string> row_names;
  std::vector<std::vector<Term>> row_terms;
  std::vector<double> rhs;
  std::string obj_row;

  enum class Sec { none, objsense, rows, columns, rhs, bounds, done } sec = Sec::none;
  bool in_int = false;
  std::unordered_map<std::string, int> col_index;
  struct Col {
    std::string name;
    bool integral;
    double obj = 0.0;
    double lo = 0.0, hi = kInf;
    bool binary = false;
  };
  std::vector<Col> cols;
  ObjSense sense = ObjSense::minimize;
  std::string name = "model";

  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos < text.size() && sec != Sec::done) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '*') continue;
    const auto f = detail::fields(line);
    if (f.empty()) continue;

    if (line.front() != ' ' && line.front() != '\t') {
      if (f[0] == "NAME") {
        name = f.size() > 1 ? std::string(f[1]) : "";
        sec = Sec::none;
      } else if (f[0] == "OBJSENSE") {
        sec = Sec::objsense;
        if (f.size() > 1) {
          sense = f[1] == "MAX" || f[1] == "MAXIMIZE" ? ObjSense::maximize : ObjSense::minimize;
          sec = Sec::none;
        }
      } else if (f[0] == "ROWS") sec = Sec::rows;
      else if (f[0] == "COLUMNS") sec = Sec::columns;
      else if (f[0] == "RHS") sec = Sec::rhs;
      else if (f[0] == "BOUNDS") sec = Sec::bounds;
      else if (f[0] == "ENDATA") sec = Sec::done;
      else throw ParseError("unknown MPS section '" + std::string(f[0]) + "'", lineno);
      continue;
    }

    switch (sec) {
      case Sec::objsense:
        sense = f[0] == "MAX" || f[0] == "MAXIMIZE" ? ObjSense::maximize : ObjSense::minimize;
        break;
      case Sec::rows: {
        if (f.size() != 2) throw ParseError("ROWS entry needs type and name", lineno);
        const std::string rn(f[1]);
        if (f[0] == "N") {
          if (obj_row.empty()) obj_row = rn;
          break;
        }
        RowSense s;
        if (f[0] == "L") s = RowSense::le;
        else if (f[0] == "G") s = RowSense::ge;
        else if (f[0] == "E") s = RowSense::eq;
        else throw ParseError("bad row type '" + std::string(f[0]) + "'", lineno);
        if (!row_index.emplace(rn, static_cast<int>(row_names.size())).second) throw ParseError("duplicate row " + rn, lineno);
        row_names.push_back(rn);
        senses.push_back(s);
        row_terms.emplace_back();
        rhs.push_back(0.0);
        break;
      }
      case Sec::columns: {
        if (f.size() >= 3 && f[1] == "'MARKER'") {
          if (f[2] == "'INTORG'") in_int = true;
          else if (f[2] == "'INTEND'") in_int = false;
          else throw ParseError("bad marker", lineno);
          break;
        }
        if (f.size() != 3 && f.size() != 5) throw ParseError("COLUMNS entry needs 3 or 5 fields", lineno);
        const std::string cn(f[0]);
        auto [it, fresh] = col_index.emplace(cn, static_cast<int>(cols.size()));
        if (fresh) cols.push_back({cn, in_int});
        const int j = it->second;
        for (std::size_t k = 1; k + 1 < f.size(); k += 2) {
          const double v = detail::parse_num(f[k + 1], lineno);
          if (f[k] == obj_row) {
            cols[j].obj = v;
            continue;
          }
          auto r = row_index.find(std::string(f[k]));
          if (r == row_index.end()) throw ParseError("unknown row '" + std::string(f[k]) + "'", lineno);
          row_terms[r->second].push_back({j, v});
        }
        break;
      }
      case Sec::rhs: {
        for (std::size_t k = 1; k + 1 < f.size(); k += 2) {
          if (f[k] == obj_row) continue;
          auto r = row_index.find(std::string(f[k]));
          if (r == row_index.end()) throw ParseError("unknown row '" + std::string(f[k]) + "'", lineno);
          rhs[r->second] = detail::parse_num(f[k + 1], lineno);
        }
        break;
      }
      case Sec::bounds: {
        if (f.size() < 3) throw ParseError("BOUNDS entry too short", lineno);
        auto c = col_index.find(std::string(f[2]));
        if (c == col_index.end()) throw ParseError("unknown column '" + std::string(f[2]) + "'", lineno);
        Col& col = cols[c->second];
        const std::string_view type = f[0];
        const bool needs_value = type == "UP" || type == "LO" || type == "FX";
        if (needs_value && f.size() < 4) throw ParseError("bound needs a value", lineno);
        const double v = needs_value ? detail::parse_num(f[3], lineno) : 0.0;
        if (type == "UP") col.hi = v;
        else if (type == "LO") col.lo = v;
        else if (type == "FX") col.lo = col.hi = v;
        else if (type == "FR") col.lo = -kInf, col.hi = kInf;
        else if (type == "MI") col.lo = -kInf;
        else if (type == "PL") col.hi = kInf;
        else if (type == "BV") col.lo = 0.0, col.hi = 1.0, col.binary = true, col.integral = true;
        else throw ParseError("bad bound type '" + std::string(type) + "'", lineno);
        break;
      }
      default: throw ParseError("data outside a section", lineno);
    }
  }
  if (sec != Sec::done) throw ParseError("missing ENDATA", lineno);

  m = Model(name);
  m.set_sense(sense);
  for (const Col& c : cols) {
    const VarKind k = c.binary ? VarKind::binary : c.integral ? VarKind::integer : VarKind::continuous;
    m.add_variable(c.name, k, c.lo, c.hi, c.obj);
  }
  for (std::size_t i = 0; i < row_names.size(); ++i)
    m.add_constraint(row_names[i], std::move(row_terms[i]), senses[i], rhs[i]);
  return m;
}

inline std::string write_lp(const Model& m) {
  std::string out = "\\ " + m.name() + "\n";
  auto linear = [&](const std::vector<Term>& ts) {
    std::string s;
    int on_line = 0;
    for (const Term& t : ts) {
      if (on_line == 8) {
        s += "\n   ";
        on_line = 0;
      }
      s += t.coef < 0 ? " - " : (s.empty() ? " " : " + ");
      const double a = std::abs(t.coef);
      if (a != 1.0) s += detail::num(a) + " ";
      s += m.variable(t.var).name;
      ++on_line;
    }
    return s.empty() ? std::string(" 0") : s;
  };
  out += m.sense() == ObjSense::maximize ? "Maximize\n" : "Minimize\n";
  std::vector<Term> obj;
  for (int j = 0; j < m.variable_count(); ++j)
    if (m.objective()[j] != 0.0) obj.push_back({j, m.objective()[j]});
  out += " obj:" + linear(obj) + "\n";
  out += "Subject To\n";
  for (const auto& r : m.constraints()) {
    const char* op = r.sense == RowSense::le ? " <= " : r.sense == RowSense::ge ? " >= " : " = ";
    out += " " + r.name + ":" + linear(r.terms) + op + detail::num(r.rhs) + "\n";
  }
  out += "Bounds\n";
  for (const Variable& v : m.variables()) {
    if (v.kind == VarKind::binary) continue;
    if (v.lower == -kInf && v.upper == kInf) out += " " + v.name + " free\n";
    else if (v.lower == v.upper) out += " " + v.name + " = " + detail::num(v.lower) + "\n";
    else {
      const std::string lo = v.lower == -kInf ? "-inf" : detail::num(v.lower);
      const std::string hi = v.upper == kInf ? "+inf" : detail::num(v.upper);
      if (v.lower != 0.0 || v.upper != kInf) out += " " + lo + " <= " + v.name + " <= " + hi + "\n";
    }
  }
  std::string gen, bin;
  for (const Variable& v : m.variables()) {
    if (v.kind == VarKind::integer) gen += " " + v.name + "\n";
    if (v.kind == VarKind::binary) bin += " " + v.name + "\n";
  }
  if (!gen.empty()) out += "General\n" + gen;
  if (!bin.empty()) out += "Binary\n" + bin;
  out += "End\n";
  return out;
}

inline void save_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write '" + path + "'");
  f << text;
  if (!f) throw Error("write failed for '" + path + "'");
}

inline Model load_mps(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "'");
  std::stringstream buf;
  buf << f.rdbuf();
  return read_mps(buf.str());
}

}  // namespace regenpool::milp

#include <cctype>
#include <cmath>
#include <cstdio>
#include <string>
#include <unordered_set>
#include <vector>

#include "gridsched/error.hpp"
#include "gridsched/optmodel.hpp"

namespace gridsched::opt {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void require_finite(double v, const std::string& where) {
  require(std::isfinite(v), ErrorKind::InvalidModel, "non-finite coefficient in " + where);
}

/// Appends " + 3 x" style terms, wrapping long lines.
void write_terms(std::string& out, const std::vector<std::pair<std::string, double>>& terms,
                 std::size_t& column) {
  bool first = true;
  for (const auto& [name, coef] : terms) {
    std::string piece;
    if (first) {
      piece = coef < 0 ? "- " : "";
    } else {
      piece = coef < 0 ? " - " : " + ";
    }
    const double mag = std::abs(coef);
    if (mag != 1.0) piece += num(mag) + " ";
    piece += name;
    if (column + piece.size() > 240) {
      out += "\n   ";
      column = 3;
    }
    out += piece;
    column += piece.size();
    first = false;
  }
}

}  // namespace

std::string sanitize_name(const std::string& name) {
  std::string out;
  out.reserve(name.size() + 1);
  for (char c : name) out += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  if (out.empty() || std::isdigit(static_cast<unsigned char>(out.front()))) out.insert(0, "_");
  return out;
}

std::string export_lp_text(const OptModel& model) {
  std::unordered_set<std::string> used;
  auto unique = [&used](std::string base) {
    std::string candidate = base;
    for (int k = 1; !used.insert(candidate).second; ++k) candidate = base + "_" + std::to_string(k);
    return candidate;
  };
  std::vector<std::string> vnames;
  vnames.reserve(model.num_variables());
  for (const Variable& v : model.variables()) vnames.push_back(unique(sanitize_name(v.name)));
  std::vector<std::string> rnames;
  for (const Constraint& c : model.constraints()) rnames.push_back(unique(sanitize_name(c.name)));

  std::string out = model.sense() == Sense::Minimize ? "Minimize\n" : "Maximize\n";
  std::vector<std::pair<std::string, double>> terms;
  for (std::size_t j = 0; j < model.num_variables(); ++j) {
    const double c = model.objective()[j];
    require_finite(c, "objective");
    if (c != 0.0) terms.emplace_back(vnames[j], c);
  }
  const double constant = model.objective_constant();
  require_finite(constant, "objective");
  if (!terms.empty() || constant != 0.0) {
    out += " obj: ";
    std::size_t column = 6;
    write_terms(out, terms, column);
    if (constant != 0.0) {
      if (terms.empty())
        out += num(constant);
      else
        out += (constant < 0 ? " - " : " + ") + num(std::abs(constant));
    }
    out += "\n";
  }

  if (model.num_constraints() > 0) {
    out += "Subject To\n";
    for (std::size_t i = 0; i < model.num_constraints(); ++i) {
      const Constraint& c = model.constraints()[i];
      terms.clear();
      for (const Term& t : c.row) {
        require_finite(t.coef, "constraint '" + c.name + "'");
        terms.emplace_back(vnames[t.var.index], t.coef);
      }
      require_finite(c.rhs, "constraint '" + c.name + "'");
      out += " " + rnames[i] + ": ";
      std::size_t column = out.size();
      if (terms.empty()) {
        // LP readers reject empty rows; a zero multiple of a variable keeps it.
        terms.emplace_back(vnames.empty() ? "_" : vnames.front(), 0.0);
        out += "0 " + terms.front().first;
      } else {
        column = rnames[i].size() + 3;
        write_terms(out, terms, column);
      }
      const char* rel = c.relation == Relation::LessEqual  ? " <= "
                        : c.relation == Relation::Equal ? " = "
                                                          : " >= ";
      out += rel + num(c.rhs) + "\n";
    }
  }

  std::string bounds;
  std::string general;
  std::string binary;
  for (std::size_t j = 0; j < model.num_variables(); ++j) {
    const Variable& v = model.variables()[j];
    const bool is_binary = v.integral && v.lower == 0.0 && v.upper == 1.0;
    if (is_binary) {
      binary += " " + vnames[j] + "\n";
      continue;
    }
    if (v.integral) general += " " + vnames[j] + "\n";
    const bool lo_inf = v.lower == -kInf;
    const bool up_inf = v.upper == kInf;
    if (lo_inf && up_inf) {
      bounds += " " + vnames[j] + " free\n";
    } else if (v.lower == v.upper) {
      bounds += " " + vnames[j] + " = " + num(v.lower) + "\n";
    } else if (lo_inf) {
      bounds += " -infinity <= " + vnames[j] + " <= " + num(v.upper) + "\n";
    } else if (up_inf) {
      if (v.lower != 0.0) bounds += " " + vnames[j] + " >= " + num(v.lower) + "\n";
    } else {
      bounds += " " + num(v.lower) + " <= " + vnames[j] + " <= " + num(v.upper) + "\n";
    }
  }
  if (!bounds.empty()) out += "Bounds\n" + bounds;
  if (!general.empty()) out += "General\n" + general;
  if (!binary.empty()) out += "Binary\n" + binary;
  out += "End\n";
  return out;
}

}  // namespace gridsched::opt

#include "rsched/lp.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "rsched/errors.h"

namespace rsched {

int LPModel::add_variable(std::string name, double objective, double lower, double upper) {
  if (!std::isfinite(objective)) throw std::invalid_argument("objective coefficient must be finite");
  if (lower > upper) throw std::invalid_argument("variable '" + name + "' has lower > upper");
  variables_.push_back(LPVariable{std::move(name), objective, lower, upper});
  return num_variables() - 1;
}

int LPModel::add_row(std::string name, std::vector<std::pair<int, double>> coeffs,
                     RowRelation relation, double rhs) {
  std::sort(coeffs.begin(), coeffs.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  std::vector<std::pair<int, double>> merged;
  for (const auto& [col, value] : coeffs) {
    if (col < 0 || col >= num_variables()) {
      throw std::invalid_argument("row '" + name + "' references unknown column");
    }
    if (!std::isfinite(value)) throw std::invalid_argument("row '" + name + "' has non-finite data");
    if (!merged.empty() && merged.back().first == col) {
      merged.back().second += value;
    } else {
      merged.emplace_back(col, value);
    }
  }
  std::erase_if(merged, [](const auto& entry) { return entry.second == 0.0; });
  if (!std::isfinite(rhs)) throw std::invalid_argument("row '" + name + "' has non-finite rhs");
  rows_.push_back(LPRow{std::move(name), std::move(merged), relation, rhs});
  return num_rows() - 1;
}

std::size_t LPModel::nonzeros() const {
  std::size_t total = 0;
  for (const auto& row : rows_) total += row.coeffs.size();
  return total;
}

int LPModel::find_variable(const std::string& name) const {
  for (int j = 0; j < num_variables(); ++j) {
    if (variables_[static_cast<std::size_t>(j)].name == name) return j;
  }
  return -1;
}

std::string to_string(LPStatus status) {
  switch (status) {
    case LPStatus::kOptimal:
      return "optimal";
    case LPStatus::kInfeasible:
      return "infeasible";
    case LPStatus::kUnbounded:
      return "unbounded";
    case LPStatus::kIterationLimit:
      return "iteration-limit";
  }
  return "unknown";
}

LPCertificate check_solution(const LPModel& model, const LPSolution& solution) {
  LPCertificate cert;
  const bool maximize = model.sense() == Sense::kMaximize;
  const auto& vars = model.variables();
  const auto& rows = model.rows();
  if (solution.x.size() != vars.size() || solution.duals.size() != rows.size()) {
    throw std::invalid_argument("solution does not match the model dimensions");
  }
  std::vector<double> reduced(vars.size());
  for (std::size_t j = 0; j < vars.size(); ++j) reduced[j] = vars[j].objective;
  double primal_objective = 0.0;
  for (std::size_t j = 0; j < vars.size(); ++j) {
    const double xj = solution.x[j];
    primal_objective += vars[j].objective * xj;
    cert.primal_residual = std::max({cert.primal_residual, vars[j].lower - xj, xj - vars[j].upper});
  }
  double dual_objective = 0.0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const LPRow& row = rows[r];
    double activity = 0.0;
    for (const auto& [col, value] : row.coeffs) {
      activity += value * solution.x[static_cast<std::size_t>(col)];
      reduced[static_cast<std::size_t>(col)] -= value * solution.duals[r];
    }
    const double y = solution.duals[r];
    const double slack = activity - row.rhs;
    switch (row.relation) {
      case RowRelation::kLessEqual:
        cert.primal_residual = std::max(cert.primal_residual, slack);
        cert.dual_residual = std::max(cert.dual_residual, maximize ? -y : y);
        break;
      case RowRelation::kGreaterEqual:
        cert.primal_residual = std::max(cert.primal_residual, -slack);
        cert.dual_residual = std::max(cert.dual_residual, maximize ? y : -y);
        break;
      case RowRelation::kEqual:
        cert.primal_residual = std::max(cert.primal_residual, std::abs(slack));
        break;
    }
    if (row.relation != RowRelation::kEqual) {
      cert.complementarity_residual = std::max(cert.complementarity_residual, std::abs(y * slack));
    }
    dual_objective += y * row.rhs;
  }
  for (std::size_t j = 0; j < vars.size(); ++j) {
    const double d = reduced[j];
    // Bound the variable is pushed against by its reduced cost.
    const bool toward_upper = maximize ? d > 0.0 : d < 0.0;
    const double bound = toward_upper ? vars[j].upper : vars[j].lower;
    if (d == 0.0) continue;
    if (!std::isfinite(bound)) {
      cert.dual_residual = std::max(cert.dual_residual, std::abs(d));
      continue;
    }
    dual_objective += d * bound;
    cert.complementarity_residual =
        std::max(cert.complementarity_residual, std::abs(d * (solution.x[j] - bound)));
  }
  cert.dual_objective = dual_objective;
  cert.objective_gap = std::abs(primal_objective - dual_objective);
  return cert;
}

LPSolution SimplexBackend::solve(const LPModel& model) const { return solve_lp(model, options_); }

namespace {

std::string format_number(double value) {
  if (value == kInf) return "inf";
  if (value == -kInf) return "-inf";
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

void write_terms(std::ostream& out, const std::vector<std::pair<int, double>>& terms,
                 const std::vector<LPVariable>& vars) {
  bool first = true;
  int on_line = 0;
  for (const auto& [col, value] : terms) {
    if (on_line == 8) {
      out << "\n   ";
      on_line = 0;
    }
    const double magnitude = std::abs(value);
    if (first) {
      out << (value < 0 || std::signbit(value) ? "- " : "");
    } else {
      out << (value < 0 || std::signbit(value) ? " - " : " + ");
    }
    out << format_number(magnitude) << ' ' << vars[static_cast<std::size_t>(col)].name;
    first = false;
    ++on_line;
  }
  if (first) out << "0";
}

std::string relation_text(RowRelation relation) {
  switch (relation) {
    case RowRelation::kLessEqual:
      return "<=";
    case RowRelation::kGreaterEqual:
      return ">=";
    case RowRelation::kEqual:
      return "=";
  }
  return "=";
}

}  // namespace

void write_lp_text(const LPModel& model, std::ostream& out) {
  const auto& vars = model.variables();
  out << "\\ exported by rsched\n";
  out << (model.sense() == Sense::kMaximize ? "Maximize\n" : "Minimize\n");
  out << " obj: ";
  std::vector<std::pair<int, double>> objective;
  for (int j = 0; j < model.num_variables(); ++j) {
    objective.emplace_back(j, vars[static_cast<std::size_t>(j)].objective);
  }
  write_terms(out, objective, vars);
  out << "\nSubject To\n";
  for (const LPRow& row : model.rows()) {
    out << ' ' << row.name << ": ";
    write_terms(out, row.coeffs, vars);
    out << ' ' << relation_text(row.relation) << ' ' << format_number(row.rhs) << '\n';
  }
  out << "Bounds\n";
  for (const LPVariable& v : vars) {
    if (v.lower == 0.0 && v.upper == kInf) continue;
    if (v.lower == -kInf && v.upper == kInf) {
      out << ' ' << v.name << " free\n";
    } else if (v.lower == v.upper) {
      out << ' ' << v.name << " = " << format_number(v.lower) << '\n';
    } else {
      out << ' ' << format_number(v.lower) << " <= " << v.name << " <= " << format_number(v.upper)
          << '\n';
    }
  }
  out << "End\n";
}

std::string to_lp_text(const LPModel& model) {
  std::ostringstream out;
  write_lp_text(model, out);
  return out.str();
}

namespace {

enum class TokenKind { kNumber, kName, kPlus, kMinus, kColon, kRelation, kEnd };

struct Token {
  TokenKind kind;
  std::string text;
  double number = 0.0;
};

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return s;
}

bool is_name_char(char ch) {
  return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '.' || ch == '[' ||
         ch == ']' || ch == '#' || ch == '$' || ch == '\'' || ch == '{' || ch == '}' || ch == '~';
}

std::vector<Token> tokenize(const std::string& line) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    const char ch = line[i];
    if (std::isspace(static_cast<unsigned char>(ch))) {
      ++i;
    } else if (ch == '\\') {
      break;  // comment
    } else if (ch == '+') {
      tokens.push_back({TokenKind::kPlus, "+"});
      ++i;
    } else if (ch == '-') {
      tokens.push_back({TokenKind::kMinus, "-"});
      ++i;
    } else if (ch == ':') {
      tokens.push_back({TokenKind::kColon, ":"});
      ++i;
    } else if (ch == '<' || ch == '>' || ch == '=') {
      std::string rel(1, ch);
      ++i;
      if (i < line.size() && (line[i] == '=' || line[i] == '<' || line[i] == '>')) rel += line[i++];
      if (rel == "<" || rel == "=<") rel = "<=";
      if (rel == ">" || rel == "=>") rel = ">=";
      tokens.push_back({TokenKind::kRelation, rel});
    } else if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
      std::size_t used = 0;
      const double value = std::stod(line.substr(i), &used);
      tokens.push_back({TokenKind::kNumber, line.substr(i, used), value});
      i += used;
    } else if (is_name_char(ch)) {
      std::size_t j = i;
      while (j < line.size() && is_name_char(line[j])) ++j;
      std::string word = line.substr(i, j - i);
      const std::string low = lower(word);
      if (low == "inf" || low == "infinity") {
        tokens.push_back({TokenKind::kNumber, word, kInf});
      } else {
        tokens.push_back({TokenKind::kName, word});
      }
      i = j;
    } else {
      throw ParseError(std::string("unexpected character '") + ch + "' in LP text");
    }
  }
  return tokens;
}

enum class Section { kNone, kObjective, kConstraints, kBounds, kDone };

class LPTextParser {
 public:
  LPModel parse(std::istream& in) {
    std::string line;
    std::vector<Token> pending;
    Section section = Section::kNone;
    while (std::getline(in, line)) {
      const std::string low = lower(trim(line));
      Section next = section;
      if (low == "maximize" || low == "maximum" || low == "max") {
        model_.set_sense(Sense::kMaximize);
        next = Section::kObjective;
      } else if (low == "minimize" || low == "minimum" || low == "min") {
        model_.set_sense(Sense::kMinimize);
        next = Section::kObjective;
      } else if (low == "subject to" || low == "such that" || low == "st" || low == "s.t.") {
        next = Section::kConstraints;
      } else if (low == "bounds" || low == "bound") {
        next = Section::kBounds;
      } else if (low == "end") {
        next = Section::kDone;
      }
      if (next != section) {
        flush(section, pending);
        section = next;
        if (section == Section::kDone) break;
        continue;
      }
      auto tokens = tokenize(line);
      if (section == Section::kBounds) {
        if (!tokens.empty()) parse_bound(tokens);
        continue;
      }
      // Objective and constraints may span lines: a constraint ends at its
      // right-hand side number.
      for (auto& tok : tokens) {
        pending.push_back(std::move(tok));
        if (section == Section::kConstraints && pending.size() >= 2 &&
            pending.back().kind == TokenKind::kNumber) {
          const auto& before = pending[pending.size() - 2];
          const bool signed_rhs = pending.size() >= 3 && before.kind == TokenKind::kMinus &&
                                  pending[pending.size() - 3].kind == TokenKind::kRelation;
          if (before.kind == TokenKind::kRelation || signed_rhs) {
            parse_constraint(pending);
            pending.clear();
          }
        }
      }
    }
    if (section != Section::kDone) flush(section, pending);
    return std::move(model_);
  }

 private:
  static std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
  }

  int column(const std::string& name) {
    if (auto it = columns_.find(name); it != columns_.end()) return it->second;
    const int j = model_.add_variable(name, 0.0);
    columns_.emplace(name, j);
    return j;
  }

  void flush(Section section, std::vector<Token>& pending) {
    if (section == Section::kObjective && !pending.empty()) {
      std::size_t pos = 0;
      if (pending.size() >= 2 && pending[0].kind == TokenKind::kName &&
          pending[1].kind == TokenKind::kColon) {
        pos = 2;
      }
      for (const auto& [col, value] : parse_expression(pending, pos, pending.size())) {
        model_.variable(col).objective += value;
      }
    } else if (section == Section::kConstraints && !pending.empty()) {
      throw ParseError("incomplete constraint in LP text");
    }
    pending.clear();
  }

  std::vector<std::pair<int, double>> parse_expression(const std::vector<Token>& tokens,
                                                       std::size_t begin, std::size_t end) {
    std::vector<std::pair<int, double>> terms;
    double sign = 1.0;
    double coef = 1.0;
    bool have_coef = false;
    for (std::size_t i = begin; i < end; ++i) {
      const Token& tok = tokens[i];
      switch (tok.kind) {
        case TokenKind::kPlus:
          break;
        case TokenKind::kMinus:
          sign = -sign;
          break;
        case TokenKind::kNumber:
          coef *= tok.number;
          have_coef = true;
          break;
        case TokenKind::kName:
          terms.emplace_back(column(tok.text), sign * coef);
          sign = 1.0;
          coef = 1.0;
          have_coef = false;
          break;
        default:
          throw ParseError("unexpected token '" + tok.text + "' in expression");
      }
    }
    if (have_coef && coef != 0.0) throw ParseError("constant terms are not supported in LP text");
    return terms;
  }

  void parse_constraint(const std::vector<Token>& tokens) {
    std::size_t pos = 0;
    std::string name = "c" + std::to_string(model_.num_rows() + 1);
    if (tokens.size() >= 2 && tokens[0].kind == TokenKind::kName &&
        tokens[1].kind == TokenKind::kColon) {
      name = tokens[0].text;
      pos = 2;
    }
    std::size_t rel = pos;
    while (rel < tokens.size() && tokens[rel].kind != TokenKind::kRelation) ++rel;
    if (rel == tokens.size()) throw ParseError("constraint '" + name + "' lacks a relation");
    double rhs = tokens.back().number;
    if (tokens[tokens.size() - 2].kind == TokenKind::kMinus) rhs = -rhs;
    const std::string& r = tokens[rel].text;
    const RowRelation relation = r == "<=" ? RowRelation::kLessEqual
                                 : r == ">=" ? RowRelation::kGreaterEqual
                                             : RowRelation::kEqual;
    model_.add_row(name, parse_expression(tokens, pos, rel), relation, rhs);
  }

  static double signed_number(const std::vector<Token>& t, std::size_t& i) {
    double sign = 1.0;
    if (i < t.size() && (t[i].kind == TokenKind::kMinus || t[i].kind == TokenKind::kPlus)) {
      if (t[i].kind == TokenKind::kMinus) sign = -1.0;
      ++i;
    }
    if (i >= t.size() || t[i].kind != TokenKind::kNumber) throw ParseError("expected a number in bound");
    return sign * t[i++].number;
  }

  void parse_bound(const std::vector<Token>& t) {
    std::size_t i = 0;
    if (t[0].kind == TokenKind::kName) {
      const int j = column(t[0].text);
      LPVariable& v = model_.variable(j);
      if (t.size() == 2 && t[1].kind == TokenKind::kName && lower(t[1].text) == "free") {
        v.lower = -kInf;
        v.upper = kInf;
        return;
      }
      i = 2;
      if (t.size() < 3 || t[1].kind != TokenKind::kRelation) throw ParseError("malformed bound");
      const double value = signed_number(t, i);
      if (t[1].text == "<=") v.upper = value;
      else if (t[1].text == ">=") v.lower = value;
      else v.lower = v.upper = value;
      return;
    }
    const double lo = signed_number(t, i);
    if (i + 1 >= t.size() || t[i].kind != TokenKind::kRelation || t[i + 1].kind != TokenKind::kName) {
      throw ParseError("malformed bound");
    }
    const std::string rel = t[i].text;
    LPVariable& v = model_.variable(column(t[i + 1].text));
    i += 2;
    if (rel == "<=") v.lower = lo;
    else if (rel == ">=") v.upper = lo;
    else v.lower = v.upper = lo;
    if (i < t.size()) {
      if (t[i].kind != TokenKind::kRelation) throw ParseError("malformed bound");
      const std::string rel2 = t[i].text;
      ++i;
      const double hi = signed_number(t, i);
      if (rel2 == "<=") v.upper = hi;
      else v.lower = hi;
    }
  }

  LPModel model_;
  std::unordered_map<std::string, int> columns_;
};

}  // namespace

LPModel read_lp_text(std::istream& in) { return LPTextParser().parse(in); }

}  // namespace rsched

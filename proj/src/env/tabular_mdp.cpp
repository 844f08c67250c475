#include "gchr/env/tabular_mdp.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "gchr/errors.hpp"

namespace gchr::env {

TabularGCMDP::TabularGCMDP(int n_states, int n_actions, std::vector<double> transitions,
                           std::vector<int> phi, double gamma, bool absorbing_goals)
    : n_states_(n_states),
      n_actions_(n_actions),
      transitions_(std::move(transitions)),
      phi_(std::move(phi)),
      gamma_(gamma),
      absorbing_goals_(absorbing_goals) {
  require(n_states_ > 0 && n_actions_ > 0, "TabularGCMDP: sizes must be positive");
  require(gamma_ >= 0.0 && gamma_ < 1.0, "TabularGCMDP: gamma must lie in [0, 1)");
  require(transitions_.size() ==
              static_cast<std::size_t>(n_states_) * n_actions_ * n_states_,
          "TabularGCMDP: transition tensor has wrong size");
  require(static_cast<int>(phi_.size()) == n_states_, "TabularGCMDP: phi table has wrong size");
  for (int s = 0; s < n_states_; ++s) {
    for (int a = 0; a < n_actions_; ++a) {
      const double* r = row(s, a);
      double sum = 0.0;
      for (int k = 0; k < n_states_; ++k) {
        require(r[k] >= 0.0 && std::isfinite(r[k]),
                "TabularGCMDP: negative or non-finite probability in row (" + std::to_string(s) +
                    ", " + std::to_string(a) + ")");
        sum += r[k];
      }
      require(std::abs(sum - 1.0) <= 1e-12, "TabularGCMDP: row (" + std::to_string(s) + ", " +
                                                std::to_string(a) + ") sums to " +
                                                std::to_string(sum));
    }
  }
  int max_goal = -1;
  for (int g : phi_) {
    require(g >= 0, "TabularGCMDP: goal ids must be non-negative");
    max_goal = std::max(max_goal, g);
  }
  goal_sets_.assign(max_goal + 1, {});
  for (int s = 0; s < n_states_; ++s) goal_sets_[phi_[s]].push_back(s);
}

std::vector<double> tabular_step_distribution(const TabularGCMDP& mdp, int s, int a, int goal) {
  require(s >= 0 && s < mdp.n_states(), "tabular_step_distribution: state out of range");
  require(a >= 0 && a < mdp.n_actions(), "tabular_step_distribution: action out of range");
  require(goal >= 0 && goal < mdp.n_goals(), "tabular_step_distribution: goal out of range");
  std::vector<double> out(mdp.n_states(), 0.0);
  if (mdp.absorbing_goals() && mdp.phi(s) == goal) {
    out[s] = 1.0;
  } else {
    const double* r = mdp.row(s, a);
    out.assign(r, r + mdp.n_states());
  }
  return out;
}

namespace {

// Whitespace tokens with '#' comments removed.
std::vector<std::string> tokenize_line(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream ss(line.substr(0, line.find('#')));
  std::string tok;
  while (ss >> tok) tokens.push_back(tok);
  return tokens;
}

double parse_double(const std::string& s, int line_no) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ContractViolation("gcmdp line " + std::to_string(line_no) + ": bad number '" + s + "'");
}

int parse_int(const std::string& s, int line_no) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(s, &pos);
    if (pos == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ContractViolation("gcmdp line " + std::to_string(line_no) + ": bad integer '" + s + "'");
}

}  // namespace

TabularGCMDP parse_tabular_gcmdp(std::istream& in) {
  int n_states = -1, n_actions = -1;
  double gamma = 0.0;
  bool absorbing = true;
  std::vector<int> phi;
  std::vector<double> transitions;
  std::vector<char> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tok = tokenize_line(line);
    if (tok.empty()) continue;
    if (tok[0] == "gcmdp") {
      require(n_states < 0, "gcmdp line " + std::to_string(line_no) + ": duplicate header");
      require(tok.size() == 5, "gcmdp line " + std::to_string(line_no) +
                                   ": header needs n_states n_actions gamma absorbing");
      n_states = parse_int(tok[1], line_no);
      n_actions = parse_int(tok[2], line_no);
      gamma = parse_double(tok[3], line_no);
      absorbing = parse_int(tok[4], line_no) != 0;
      require(n_states > 0 && n_actions > 0, "gcmdp: sizes must be positive");
      transitions.assign(static_cast<std::size_t>(n_states) * n_actions * n_states, 0.0);
      seen.assign(static_cast<std::size_t>(n_states) * n_actions, 0);
      continue;
    }
    require(n_states > 0, "gcmdp line " + std::to_string(line_no) + ": header must come first");
    if (tok[0] == "phi") {
      require(phi.empty(), "gcmdp line " + std::to_string(line_no) + ": duplicate phi table");
      require(static_cast<int>(tok.size()) == n_states + 1,
              "gcmdp line " + std::to_string(line_no) + ": phi needs one entry per state");
      for (int s = 0; s < n_states; ++s) phi.push_back(parse_int(tok[s + 1], line_no));
      continue;
    }
    require(static_cast<int>(tok.size()) == n_states + 2,
            "gcmdp line " + std::to_string(line_no) + ": transition row needs s a and " +
                std::to_string(n_states) + " probabilities");
    const int s = parse_int(tok[0], line_no);
    const int a = parse_int(tok[1], line_no);
    require(s >= 0 && s < n_states && a >= 0 && a < n_actions,
            "gcmdp line " + std::to_string(line_no) + ": state/action out of range");
    const auto idx = static_cast<std::size_t>(s) * n_actions + a;
    require(!seen[idx], "gcmdp line " + std::to_string(line_no) + ": duplicate row");
    seen[idx] = 1;
    for (int k = 0; k < n_states; ++k)
      transitions[idx * n_states + k] = parse_double(tok[k + 2], line_no);
  }
  require(n_states > 0, "gcmdp: missing header");
  require(!phi.empty(), "gcmdp: missing phi table");
  for (std::size_t i = 0; i < seen.size(); ++i)
    require(seen[i] != 0, "gcmdp: missing transition row for (s, a) = (" +
                              std::to_string(i / n_actions) + ", " +
                              std::to_string(i % n_actions) + ")");
  return TabularGCMDP(n_states, n_actions, std::move(transitions), std::move(phi), gamma,
                      absorbing);
}

TabularGCMDP load_tabular_gcmdp(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ContractViolation("cannot open gcmdp file " + path.string());
  return parse_tabular_gcmdp(in);
}

void write_tabular_gcmdp(std::ostream& out, const TabularGCMDP& mdp) {
  out << std::setprecision(17);
  out << "gcmdp " << mdp.n_states() << ' ' << mdp.n_actions() << ' ' << mdp.gamma() << ' '
      << (mdp.absorbing_goals() ? 1 : 0) << '\n';
  out << "phi";
  for (int g : mdp.phi_table()) out << ' ' << g;
  out << '\n';
  for (int s = 0; s < mdp.n_states(); ++s) {
    for (int a = 0; a < mdp.n_actions(); ++a) {
      out << s << ' ' << a;
      for (int k = 0; k < mdp.n_states(); ++k) out << ' ' << mdp.p(s, a, k);
      out << '\n';
    }
  }
}

}  // namespace gchr::env

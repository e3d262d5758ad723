#include "recapc/pomdp.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace recapc {

namespace {

std::string sanitize(const std::string& name) {
  std::string out;
  for (char c : name)
    out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ? c : '_');
  return out;
}

std::string fmt(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.12g", v);
  return buffer;
}

}  // namespace

PomdpModel build_pomdp(const Instance& instance) {
  const std::size_t K = instance.n_categories();
  const std::size_t M = instance.n_types();
  const std::size_t S = 2 * M + 1;
  const std::size_t absorb = S - 1;
  const double gamma = instance.p_max();

  PomdpModel model;
  model.discount = gamma;
  for (std::size_t m = 0; m < M; ++m) {
    model.states.push_back(sanitize(instance.types()[m]) + "_s");
    model.states.push_back(sanitize(instance.types()[m]) + "_f");
  }
  model.states.push_back("ABSORB");
  for (std::size_t k = 0; k < K; ++k) model.actions.push_back(sanitize(instance.categories()[k]));
  model.observations = {"like", "dislike"};

  model.start.assign(S, 0.0);
  for (std::size_t m = 0; m < M; ++m) model.start[2 * m] = instance.prior()[m];

  model.transition.assign(K, std::vector<std::vector<double>>(S, std::vector<double>(S, 0.0)));
  model.observation.assign(K, std::vector<std::vector<double>>(S, std::vector<double>(2, 0.0)));
  model.reward.assign(K, std::vector<std::vector<double>>(S, std::vector<double>(S, 0.0)));

  for (std::size_t k = 0; k < K; ++k) {
    auto& t = model.transition[k];
    auto& o = model.observation[k];
    auto& r = model.reward[k];
    for (std::size_t m = 0; m < M; ++m) {
      const std::size_t ms = 2 * m;
      const std::size_t mf = 2 * m + 1;
      const double p = instance.p(k, m);
      // First round: a like pays 1 and enters the flow state. The flow
      // state's like-probability is divided by gamma, which cancels the
      // discount so every surviving round still pays an expected 1 * p path.
      const double flow = gamma > 0.0 ? p / gamma : 0.0;
      t[ms][mf] = p;
      t[ms][absorb] = 1.0 - p;
      t[mf][mf] = flow;
      t[mf][absorb] = 1.0 - flow;
      r[ms][mf] = 1.0;
      r[mf][mf] = 1.0;
      // Observations are deterministic on the landing state. Session states
      // are never entered, so their row is vacuous; keep it stochastic.
      o[ms][0] = 1.0;
      o[mf][0] = 1.0;
    }
    t[absorb][absorb] = 1.0;
    o[absorb][1] = 1.0;
  }
  return model;
}

void write_pomdp(const PomdpModel& model, std::ostream& out) {
  out << "discount: " << fmt(model.discount) << "\n";
  out << "values: reward\n";
  out << "states:";
  for (const auto& s : model.states) out << ' ' << s;
  out << "\nactions:";
  for (const auto& a : model.actions) out << ' ' << a;
  out << "\nobservations:";
  for (const auto& o : model.observations) out << ' ' << o;
  out << "\nstart:";
  for (double v : model.start) out << ' ' << fmt(v);
  out << "\n\n";

  const std::size_t S = model.states.size();
  for (std::size_t a = 0; a < model.actions.size(); ++a) {
    for (std::size_t s = 0; s < S; ++s)
      for (std::size_t s2 = 0; s2 < S; ++s2)
        if (model.transition[a][s][s2] != 0.0)
          out << "T: " << model.actions[a] << " : " << model.states[s] << " : " << model.states[s2]
              << ' ' << fmt(model.transition[a][s][s2]) << "\n";
    for (std::size_t s2 = 0; s2 < S; ++s2)
      for (std::size_t o = 0; o < model.observations.size(); ++o)
        if (model.observation[a][s2][o] != 0.0)
          out << "O: " << model.actions[a] << " : " << model.states[s2] << " : "
              << model.observations[o] << ' ' << fmt(model.observation[a][s2][o]) << "\n";
    for (std::size_t s = 0; s < S; ++s)
      for (std::size_t s2 = 0; s2 < S; ++s2)
        if (model.reward[a][s][s2] != 0.0)
          out << "R: " << model.actions[a] << " : " << model.states[s] << " : " << model.states[s2]
              << " : * " << fmt(model.reward[a][s][s2]) << "\n";
    out << "\n";
  }
}

void write_pomdp_file(const PomdpModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open output file: " + path);
  write_pomdp(model, out);
}

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> tokens;
  std::stringstream ss(line);
  std::string token;
  while (ss >> token) tokens.push_back(token);
  return tokens;
}

std::size_t index_of(const std::vector<std::string>& names, const std::string& name,
                     const std::string& what) {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw ParseError("unknown " + what + " in POMDP file: " + name);
  return static_cast<std::size_t>(it - names.begin());
}

}  // namespace

PomdpModel read_pomdp(std::istream& in) {
  PomdpModel model;
  bool sized = false;
  auto ensure_sized = [&] {
    if (sized) return;
    if (model.states.empty() || model.actions.empty() || model.observations.empty())
      throw ParseError("POMDP file lists entries before declaring states/actions/observations");
    const std::size_t S = model.states.size();
    model.transition.assign(model.actions.size(),
                            std::vector<std::vector<double>>(S, std::vector<double>(S, 0.0)));
    model.observation.assign(
        model.actions.size(),
        std::vector<std::vector<double>>(S, std::vector<double>(model.observations.size(), 0.0)));
    model.reward.assign(model.actions.size(),
                        std::vector<std::vector<double>>(S, std::vector<double>(S, 0.0)));
    sized = true;
  };

  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string head;
    ss >> head;
    std::string rest;
    std::getline(ss, rest);

    if (head == "discount:") {
      model.discount = std::stod(rest);
    } else if (head == "values:") {
      // reward semantics assumed; nothing to store
    } else if (head == "states:") {
      model.states = tokenize(rest);
    } else if (head == "actions:") {
      model.actions = tokenize(rest);
    } else if (head == "observations:") {
      model.observations = tokenize(rest);
    } else if (head == "start:") {
      auto tokens = tokenize(rest);
      model.start.clear();
      for (const auto& t : tokens) model.start.push_back(std::stod(t));
    } else if (head == "T:" || head == "O:" || head == "R:") {
      ensure_sized();
      auto tokens = tokenize(rest);
      // T: a : s : s' p     O: a : s' : o p     R: a : s : s' : * v
      std::vector<std::string> parts;
      for (const auto& t : tokens)
        if (t != ":") parts.push_back(t);
      if (head == "T:") {
        if (parts.size() != 4) throw ParseError("bad T line: " + line);
        std::size_t a = index_of(model.actions, parts[0], "action");
        std::size_t s = index_of(model.states, parts[1], "state");
        std::size_t s2 = index_of(model.states, parts[2], "state");
        model.transition[a][s][s2] = std::stod(parts[3]);
      } else if (head == "O:") {
        if (parts.size() != 4) throw ParseError("bad O line: " + line);
        std::size_t a = index_of(model.actions, parts[0], "action");
        std::size_t s2 = index_of(model.states, parts[1], "state");
        std::size_t o = index_of(model.observations, parts[2], "observation");
        model.observation[a][s2][o] = std::stod(parts[3]);
      } else {
        if (parts.size() != 5 || parts[3] != "*") throw ParseError("bad R line: " + line);
        std::size_t a = index_of(model.actions, parts[0], "action");
        std::size_t s = index_of(model.states, parts[1], "state");
        std::size_t s2 = index_of(model.states, parts[2], "state");
        model.reward[a][s][s2] = std::stod(parts[4]);
      }
    } else {
      throw ParseError("unrecognized POMDP line: " + line);
    }
  }
  ensure_sized();
  if (model.start.size() != model.states.size())
    throw ParseError("POMDP start vector length does not match the state list");
  return model;
}

PomdpModel read_pomdp_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open POMDP file: " + path);
  return read_pomdp(in);
}

double discounted_policy_value(const PomdpModel& model, const Policy& policy) {
  const std::size_t S = model.states.size();
  const double gamma = model.discount;
  if (policy.tail >= model.actions.size())
    throw ValidationError("policy tail action out of range");

  // Expected immediate reward of action a in state s.
  auto expected_reward = [&](std::size_t a, std::size_t s) {
    double r = 0.0;
    for (std::size_t s2 = 0; s2 < S; ++s2)
      r += model.transition[a][s][s2] * model.reward[a][s][s2];
    return r;
  };

  // Fixed tail: v = r_a + gamma * T_a v, solved by Gaussian elimination on
  // (I - gamma T_a) v = r_a. The system is tiny (2|M|+1 states).
  const std::size_t a_tail = policy.tail;
  std::vector<std::vector<double>> lhs(S, std::vector<double>(S + 1, 0.0));
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t s2 = 0; s2 < S; ++s2)
      lhs[s][s2] = (s == s2 ? 1.0 : 0.0) - gamma * model.transition[a_tail][s][s2];
    lhs[s][S] = expected_reward(a_tail, s);
  }
  for (std::size_t col = 0; col < S; ++col) {
    std::size_t pivot = col;
    for (std::size_t row = col + 1; row < S; ++row)
      if (std::abs(lhs[row][col]) > std::abs(lhs[pivot][col])) pivot = row;
    std::swap(lhs[col], lhs[pivot]);
    if (std::abs(lhs[col][col]) < 1e-300)
      throw ValidationError("singular system while evaluating the tail policy");
    for (std::size_t row = 0; row < S; ++row) {
      if (row == col) continue;
      double f = lhs[row][col] / lhs[col][col];
      if (f == 0.0) continue;
      for (std::size_t c2 = col; c2 <= S; ++c2) lhs[row][c2] -= f * lhs[col][c2];
    }
  }
  std::vector<double> v(S);
  for (std::size_t s = 0; s < S; ++s) v[s] = lhs[s][S] / lhs[s][s];

  // Prefix rounds, backward.
  for (std::size_t i = policy.prefix.size(); i-- > 0;) {
    std::size_t a = policy.prefix[i];
    if (a >= model.actions.size()) throw ValidationError("policy action out of range");
    std::vector<double> v2(S, 0.0);
    for (std::size_t s = 0; s < S; ++s) {
      double future = 0.0;
      for (std::size_t s2 = 0; s2 < S; ++s2) future += model.transition[a][s][s2] * v[s2];
      v2[s] = expected_reward(a, s) + gamma * future;
    }
    v = std::move(v2);
  }

  double value = 0.0;
  for (std::size_t s = 0; s < S; ++s) value += model.start[s] * v[s];
  return value;
}

double max_transition_row_error(const PomdpModel& model) {
  double worst = 0.0;
  for (const auto& per_action : model.transition)
    for (const auto& row : per_action) {
      double sum = 0.0;
      for (double v : row) sum += v;
      worst = std::max(worst, std::abs(sum - 1.0));
    }
  return worst;
}

}  // namespace recapc

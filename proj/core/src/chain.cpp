#include "rrjam/chain.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <nlohmann/json.hpp>

#include "rrjam/errors.hpp"

namespace rrjam {

namespace {

constexpr double kUniformizationMargin = 1.1; // keeps self-loop probabilities positive
constexpr double kStationaryResidualTol = 1e-12;

// Reachability over positive-rate edges from a start state, forward or along
// reversed edges.
std::vector<bool> reachable(const Eigen::MatrixXd& Q, int start, bool reverse) {
  const int n = static_cast<int>(Q.rows());
  std::vector<bool> seen(n, false);
  std::vector<int> stack{start};
  seen[start] = true;
  while (!stack.empty()) {
    const int i = stack.back();
    stack.pop_back();
    for (int j = 0; j < n; ++j) {
      if (j == i || seen[j]) continue;
      const double rate = reverse ? Q(j, i) : Q(i, j);
      if (rate > 0) {
        seen[j] = true;
        stack.push_back(j);
      }
    }
  }
  return seen;
}

ChainModel finish_chain(ChainKind kind, const StateSpace& space, double lambda, double gamma,
                        std::optional<JammerParams> jammer, Eigen::MatrixXd Q) {
  if (!is_irreducible(Q)) {
    throw ValidationError(
        "chain: the positive-rate transition graph is not strongly connected, so the stationary "
        "distribution would have zero entries (the topology yields unreachable states; this is "
        "the expected failure mode under deterministic sensing with coupled stations)");
  }
  ChainModel chain;
  chain.kind = kind;
  chain.space = space;
  chain.lambda_rate = lambda;
  chain.gamma_rate = gamma;
  chain.jammer = jammer;
  chain.Q = std::move(Q);
  chain.pi = stationary_distribution(chain.Q);
  chain.u = kUniformizationMargin * chain.Q.diagonal().cwiseAbs().maxCoeff();
  chain.P = Eigen::MatrixXd::Identity(space.size, space.size) + chain.Q / chain.u;
  return chain;
}

const char* kind_name(ChainKind k) {
  switch (k) {
    case ChainKind::compliant: return "compliant";
    case ChainKind::naive_rj: return "naive_rj";
    case ChainKind::rrj: return "rrj";
  }
  return "?";
}

ChainKind kind_from_name(const std::string& s) {
  if (s == "compliant") return ChainKind::compliant;
  if (s == "naive_rj") return ChainKind::naive_rj;
  if (s == "rrj") return ChainKind::rrj;
  throw ValidationError("chain: unknown kind '" + s + "'");
}

}  // namespace

Eigen::MatrixXd chain_generator(ChainKind kind, const IdleTable& idle, double lambda, double gamma,
                                JammerParams jammer) {
  const NetworkTopology& topo = idle.topology();
  const StateSpace space = StateSpace::make(topo.m);
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(space.size, space.size);
  for (int state = 0; state < space.size; ++state) {
    for (int k = 0; k < space.m; ++k) {
      if (space.station_active(state, k)) {
        Q(state, state & ~(1 << k)) = gamma;
        continue;
      }
      const int target = state | (1 << k);
      const double p_idle = idle(k, static_cast<StateMask>(state));
      double rate = lambda * p_idle;
      if (k == 0) {
        if (kind == ChainKind::rrj)
          rate = lambda * anomalous_probability(jammer.p_R, jammer.p_J, p_idle);
        else if (kind == ChainKind::naive_rj)
          rate = lambda * jammer.p_J * (1.0 - p_idle);
      }
      Q(state, target) = rate;
    }
    Q(state, state) = 0.0;
    Q(state, state) = -Q.row(state).sum();
  }
  return Q;
}

ChainModel build_compliant(const IdleTable& idle, double lambda, double gamma) {
  if (!(lambda > 0) || !(gamma > 0))
    throw ValidationError("chain: lambda and gamma must be positive");
  const StateSpace space = StateSpace::make(idle.topology().m);
  return finish_chain(ChainKind::compliant, space, lambda, gamma, std::nullopt,
                      chain_generator(ChainKind::compliant, idle, lambda, gamma, {}));
}

ChainModel build_rrj(const IdleTable& idle, double lambda, double gamma, double p_R, double p_J) {
  if (!(lambda > 0) || !(gamma > 0))
    throw ValidationError("chain: lambda and gamma must be positive");
  if (p_R < 0 || p_R > 1 || p_J < 0 || p_J > 1)
    throw ValidationError("chain: (p_R, p_J) must lie in [0,1]^2");
  const StateSpace space = StateSpace::make(idle.topology().m);
  const JammerParams jp{p_R, p_J};
  return finish_chain(ChainKind::rrj, space, lambda, gamma, jp,
                      chain_generator(ChainKind::rrj, idle, lambda, gamma, jp));
}

ChainModel build_naive_rj(const IdleTable& idle, double lambda, double gamma, double p_J) {
  if (!(lambda > 0) || !(gamma > 0))
    throw ValidationError("chain: lambda and gamma must be positive");
  if (!(p_J > 0) || p_J > 1) throw ValidationError("chain: naive RJ requires p_J in (0,1]");
  const StateSpace space = StateSpace::make(idle.topology().m);
  const JammerParams jp{0.0, p_J};
  return finish_chain(ChainKind::naive_rj, space, lambda, gamma, jp,
                      chain_generator(ChainKind::naive_rj, idle, lambda, gamma, jp));
}

bool is_irreducible(const Eigen::MatrixXd& Q) {
  const auto fwd = reachable(Q, 0, false);
  const auto bwd = reachable(Q, 0, true);
  for (size_t i = 0; i < fwd.size(); ++i)
    if (!fwd[i] || !bwd[i]) return false;
  return true;
}

Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& Q) {
  const int n = static_cast<int>(Q.rows());
  if (n == 0 || Q.cols() != n) throw ValidationError("stationary_distribution: Q must be square");

  std::vector<int> recurrent;
  if (is_irreducible(Q)) {
    recurrent.resize(n);
    for (int i = 0; i < n; ++i) recurrent[i] = i;
  } else {
    // Kosaraju SCC, then keep the closed classes (no edges leaving the
    // component). More than one closed class means the fixed vector of Q is
    // not unique.
    std::vector<int> order;
    order.reserve(n);
    std::vector<bool> visited(n, false);
    for (int s = 0; s < n; ++s) {
      if (visited[s]) continue;
      std::vector<std::pair<int, int>> stack{{s, 0}};
      visited[s] = true;
      while (!stack.empty()) {
        auto& [i, next] = stack.back();
        bool descended = false;
        for (int j = next; j < n; ++j) {
          if (j != i && Q(i, j) > 0 && !visited[j]) {
            next = j + 1;
            visited[j] = true;
            stack.emplace_back(j, 0);
            descended = true;
            break;
          }
        }
        if (!descended) {
          order.push_back(i);
          stack.pop_back();
        }
      }
    }
    std::vector<int> component(n, -1);
    int n_components = 0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      if (component[*it] != -1) continue;
      const int c = n_components++;
      std::vector<int> stack{*it};
      component[*it] = c;
      while (!stack.empty()) {
        const int i = stack.back();
        stack.pop_back();
        for (int j = 0; j < n; ++j)
          if (j != i && Q(j, i) > 0 && component[j] == -1) {
            component[j] = c;
            stack.push_back(j);
          }
      }
    }
    std::vector<bool> closed(n_components, true);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (j != i && Q(i, j) > 0 && component[j] != component[i]) closed[component[i]] = false;
    int closed_class = -1, classes = 0;
    for (int c = 0; c < n_components; ++c)
      if (closed[c]) {
        ++classes;
        closed_class = c;
      }
    if (classes != 1)
      throw ValidationError("stationary_distribution: generator has " + std::to_string(classes) +
                            " closed communicating classes; the null space of Q^T has dimension > 1");
    for (int i = 0; i < n; ++i)
      if (component[i] == closed_class) recurrent.push_back(i);
  }

  // Subtraction-free state elimination (Grassmann-Taksar-Heyman): every
  // intermediate is a sum or product of nonnegative rates, so stationary
  // masses come out positive to full relative accuracy even when they span
  // hundreds of orders of magnitude. A plain LU solve loses the tiny
  // components to roundoff.
  const int nr = static_cast<int>(recurrent.size());
  Eigen::MatrixXd A(nr, nr);
  for (int a = 0; a < nr; ++a)
    for (int b = 0; b < nr; ++b) A(a, b) = a == b ? 0.0 : Q(recurrent[a], recurrent[b]);
  for (int k = nr - 1; k >= 1; --k) {
    double out_rate = 0;
    for (int j = 0; j < k; ++j) out_rate += A(k, j);
    if (!(out_rate > 0))
      throw NumericalError("stationary_distribution: eliminated state has no exit rate "
                           "(reducible input)");
    for (int i = 0; i < k; ++i) A(i, k) /= out_rate;
    for (int i = 0; i < k; ++i) {
      const double into_k = A(i, k);
      if (into_k == 0) continue;
      for (int j = 0; j < k; ++j)
        if (j != i) A(i, j) += into_k * A(k, j);
    }
  }
  Eigen::VectorXd x = Eigen::VectorXd::Zero(nr);
  x[0] = 1.0;
  for (int k = 1; k < nr; ++k) {
    double acc = 0;
    for (int i = 0; i < k; ++i) acc += x[i] * A(i, k); // column k holds jump probabilities
    x[k] = acc;
  }
  const double total = x.sum();

  Eigen::VectorXd pi = Eigen::VectorXd::Zero(n);
  for (int a = 0; a < nr; ++a) {
    if (!(x[a] > 0))
      throw NumericalError("stationary_distribution: non-positive mass on a recurrent state");
    pi[recurrent[a]] = x[a] / total;
  }

  const double residual = (pi.transpose() * Q).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, Q.cwiseAbs().maxCoeff());
  if (residual > kStationaryResidualTol * scale)
    throw NumericalError("stationary_distribution: residual " + std::to_string(residual) +
                         " exceeds tolerance");
  return pi;
}

UniformizedPair uniformize_pair(const ChainModel& c0, const ChainModel& c1) {
  if (c0.space.size != c1.space.size)
    throw ValidationError("uniformize_pair: mismatched state spaces");
  UniformizedPair pair;
  pair.u = kUniformizationMargin * std::max(c0.Q.diagonal().cwiseAbs().maxCoeff(),
                                            c1.Q.diagonal().cwiseAbs().maxCoeff());
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(c0.space.size, c0.space.size);
  pair.P0 = id + c0.Q / pair.u;
  pair.P1 = id + c1.Q / pair.u;
  return pair;
}

nlohmann::json chain_to_json(const ChainModel& chain) {
  nlohmann::json j;
  j["kind"] = kind_name(chain.kind);
  j["m"] = chain.space.m;
  j["lambda"] = chain.lambda_rate;
  j["gamma"] = chain.gamma_rate;
  if (chain.jammer) j["jammer"] = {{"p_R", chain.jammer->p_R}, {"p_J", chain.jammer->p_J}};
  j["u"] = chain.u;
  auto labels = nlohmann::json::array();
  for (int i = 0; i < chain.space.size; ++i) labels.push_back(chain.space.label(i));
  j["states"] = labels;
  auto matrix = [](const Eigen::MatrixXd& M) {
    auto rows = nlohmann::json::array();
    for (int i = 0; i < M.rows(); ++i) {
      auto row = nlohmann::json::array();
      for (int k = 0; k < M.cols(); ++k) row.push_back(M(i, k));
      rows.push_back(std::move(row));
    }
    return rows;
  };
  j["Q"] = matrix(chain.Q);
  j["P"] = matrix(chain.P);
  auto pi = nlohmann::json::array();
  for (int i = 0; i < chain.space.size; ++i) pi.push_back(chain.pi[i]);
  j["pi"] = pi;
  return j;
}

nlohmann::json ChainModel::to_json() const { return chain_to_json(*this); }

ChainModel chain_from_json(const nlohmann::json& j) {
  ChainModel chain;
  chain.kind = kind_from_name(j.at("kind").get<std::string>());
  chain.space = StateSpace::make(j.at("m").get<int>());
  chain.lambda_rate = j.at("lambda").get<double>();
  chain.gamma_rate = j.at("gamma").get<double>();
  if (j.contains("jammer"))
    chain.jammer = JammerParams{j.at("jammer").at("p_R").get<double>(),
                                j.at("jammer").at("p_J").get<double>()};
  chain.u = j.at("u").get<double>();
  const int n = chain.space.size;
  auto load = [n](const nlohmann::json& rows) {
    Eigen::MatrixXd M(n, n);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) M(i, k) = rows.at(i).at(k).get<double>();
    return M;
  };
  chain.Q = load(j.at("Q"));
  chain.P = load(j.at("P"));
  chain.pi = Eigen::VectorXd(n);
  for (int i = 0; i < n; ++i) chain.pi[i] = j.at("pi").at(i).get<double>();
  return chain;
}

}  // namespace rrjam

#include "gchr/tabular/fixtures.hpp"

#include <algorithm>
#include <numeric>

#include "gchr/errors.hpp"

namespace gchr::tabular {

env::TabularGCMDP chain3(double gamma) {
  std::vector<double> p = {0, 1, 0,  //
                           0, 0, 1,  //
                           0, 0, 1};
  return env::TabularGCMDP(3, 1, std::move(p), {0, 1, 2}, gamma, true);
}

namespace {

constexpr int kDx[4] = {0, 1, 0, -1};
constexpr int kDy[4] = {1, 0, -1, 0};

struct Grid {
  int width;
  int height;
  std::vector<int> cell_of;   // free index -> cell
  std::vector<int> index_of;  // cell -> free index or -1

  explicit Grid(const GridSpec& spec) : width(spec.width), height(spec.height) {
    require(width >= 1 && height >= 1, "gridworld: dimensions must be positive");
    require(spec.slip >= 0.0 && spec.slip <= 1.0, "gridworld: slip must lie in [0, 1]");
    index_of.assign(width * height, 0);
    for (int w : spec.walls) {
      require(w >= 0 && w < width * height, "gridworld: wall cell out of range");
      index_of[w] = -1;
    }
    for (int c = 0; c < width * height; ++c) {
      if (index_of[c] < 0) continue;
      index_of[c] = static_cast<int>(cell_of.size());
      cell_of.push_back(c);
    }
    require(!cell_of.empty(), "gridworld: no free cells");
  }

  int size() const { return static_cast<int>(cell_of.size()); }

  int move(int free, int dir) const {
    const int c = cell_of[free];
    const int x = c % width + kDx[dir];
    const int y = c / width + kDy[dir];
    if (x < 0 || x >= width || y < 0 || y >= height) return free;
    const int target = index_of[y * width + x];
    return target < 0 ? free : target;
  }

  // Distribution over free cells after attempting `dir`.
  std::vector<double> move_distribution(int free, int dir, double slip) const {
    std::vector<double> out(size(), 0.0);
    out[move(free, dir)] += 1.0 - slip;
    for (int d = 0; d < 4; ++d) out[move(free, d)] += slip / 4.0;
    return out;
  }
};

}  // namespace

env::TabularGCMDP gridworld(const GridSpec& spec) {
  const Grid grid(spec);
  const int n = grid.size();
  std::vector<double> p;
  p.reserve(static_cast<std::size_t>(n) * 4 * n);
  for (int s = 0; s < n; ++s)
    for (int a = 0; a < 4; ++a) {
      const auto row = grid.move_distribution(s, a, spec.slip);
      p.insert(p.end(), row.begin(), row.end());
    }
  std::vector<int> phi(n);
  std::iota(phi.begin(), phi.end(), 0);
  return env::TabularGCMDP(n, 4, std::move(p), std::move(phi), spec.gamma, true);
}

env::TabularGCMDP twin_gridworld(const GridSpec& spec) {
  const Grid grid(spec);
  const int cells = grid.size();
  const int n = 2 * cells;
  std::vector<double> p(static_cast<std::size_t>(n) * 5 * n, 0.0);
  auto at = [&](int s, int a, int next) -> double& {
    return p[(static_cast<std::size_t>(s) * 5 + a) * n + next];
  };
  for (int c = 0; c < cells; ++c) {
    for (int h = 0; h < 2; ++h) {
      const int s = 2 * c + h;
      for (int a = 0; a < 4; ++a) {
        const auto row = grid.move_distribution(c, a, spec.slip);
        for (int k = 0; k < cells; ++k) at(s, a, 2 * k + h) = row[k];
      }
      at(s, 4, 2 * c + (1 - h)) = 1.0;
    }
  }
  std::vector<int> phi(n);
  for (int s = 0; s < n; ++s) phi[s] = s / 2;
  return env::TabularGCMDP(n, 5, std::move(p), std::move(phi), spec.gamma, true);
}

env::TabularGCMDP random_absorbing_mdp(int n_states, int n_actions, double gamma,
                                       std::mt19937_64& rng) {
  require(n_states >= 1 && n_actions >= 1, "random_absorbing_mdp: sizes must be positive");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> pick_state(0, n_states - 1);
  std::vector<double> p(static_cast<std::size_t>(n_states) * n_actions * n_states, 0.0);
  for (int s = 0; s < n_states; ++s) {
    for (int a = 0; a < n_actions; ++a) {
      double* row = &p[(static_cast<std::size_t>(s) * n_actions + a) * n_states];
      const int support = std::uniform_int_distribution<int>(1, n_states)(rng);
      for (int k = 0; k < support; ++k) row[pick_state(rng)] += unit(rng) + 1e-3;
      const double total = std::accumulate(row, row + n_states, 0.0);
      for (int k = 0; k < n_states; ++k) row[k] /= total;
      // Renormalize so the row sums to one to machine precision.
      double sum = 0.0;
      int largest = 0;
      for (int k = 0; k < n_states; ++k) {
        sum += row[k];
        if (row[k] > row[largest]) largest = k;
      }
      row[largest] += 1.0 - sum;
    }
  }
  const int n_goals = std::uniform_int_distribution<int>(1, n_states)(rng);
  std::vector<int> phi(n_states);
  for (int s = 0; s < n_states; ++s) phi[s] = s < n_goals ? s : std::uniform_int_distribution<int>(0, n_goals - 1)(rng);
  std::shuffle(phi.begin(), phi.end(), rng);
  return env::TabularGCMDP(n_states, n_actions, std::move(p), std::move(phi), gamma, true);
}

env::TabularGCMDP disconnected_goal_set_mdp(double gamma) {
  // 0 and 3 share goal 0; 0 -> 1 -> 2 -> 3 and 3 -> 3.
  std::vector<double> p = {0, 1, 0, 0,  //
                           0, 0, 1, 0,  //
                           0, 0, 0, 1,  //
                           0, 0, 0, 1};
  return env::TabularGCMDP(4, 1, std::move(p), {0, 1, 2, 0}, gamma, true);
}

}  // namespace gchr::tabular

// Copyright 2026 The caseforge Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <deque>
#include <set>

#include "caseforge/lre.hpp"

namespace caseforge::lre {

std::size_t EnvGrid::size() const {
  std::size_t n = 1;
  for (const auto& [_, values] : dims) n *= values.size();
  return n;
}

Environment EnvGrid::at(std::size_t index) const {
  Environment env;
  for (auto it = dims.rbegin(); it != dims.rend(); ++it) {
    const auto& values = it->second;
    env.values[it->first] = values[index % values.size()];
    index /= values.size();
  }
  return env;
}

EnvGrid default_grid(const Machine& m) {
  EnvGrid grid;
  grid.dims.push_back({"vel", {0.0, 0.1, 1.0}});
  grid.dims.push_back({"hvel", {0.0, 0.1, 1.0}});
  grid.dims.push_back({"inOPEZ", {0.0, 1.0}});
  for (const std::string& call : referenced_calls(m)) grid.dims.push_back({call, {0.1, 0.3, 1.0, 8.0}});
  return grid;
}

DeadlockResult check_deadlock(const Machine& m, const EnvGrid& grid, std::size_t state_cap) {
  std::vector<std::optional<std::string>> offers{std::nullopt};
  {
    std::vector<std::string> sorted = m.events;
    std::sort(sorted.begin(), sorted.end());
    for (auto& e : sorted) offers.emplace_back(std::move(e));
  }
  const std::size_t env_count = grid.size();
  std::vector<Environment> envs;
  envs.reserve(env_count);
  for (std::size_t i = 0; i < env_count; ++i) envs.push_back(grid.at(i));

  DeadlockResult result;
  std::map<std::string, Configuration> reached_by;  // state -> configuration that first reached it
  std::set<std::string> visited{m.initial};
  std::deque<std::string> queue{m.initial};

  auto enabled = [&](const std::string& state, const Environment& env,
                     const std::optional<std::string>& event, bool triggered) {
    std::vector<const Transition*> out;
    for (const Transition& t : m.transitions) {
      if (t.source != state || t.trigger.has_value() != triggered) continue;
      if (triggered && t.trigger != event) continue;
      if (!t.guard || eval_guard(*t.guard, m, env)) out.push_back(&t);
    }
    return out;
  };

  while (!queue.empty()) {
    const std::string state = queue.front();
    queue.pop_front();
    bool can_move = false;
    for (const Environment& env : envs) {
      if (++result.states_explored > state_cap) {
        result.outcome = DeadlockResult::Outcome::Inconclusive;
        result.deadlock_free = false;
        return result;
      }
      const auto spontaneous = enabled(state, env, std::nullopt, false);
      for (const auto& offer : offers) {
        // Untriggered transitions pre-empt any offered event.
        const auto fired = !spontaneous.empty() ? spontaneous
                           : offer             ? enabled(state, env, offer, true)
                                               : std::vector<const Transition*>{};
        for (const Transition* t : fired) {
          can_move = true;
          if (visited.insert(t->target).second) {
            reached_by[t->target] = {state, env, offer, t->id};
            queue.push_back(t->target);
          }
        }
        if (!spontaneous.empty()) break;
      }
    }
    if (!can_move) {
      std::vector<Configuration> path;
      path.push_back({state, envs.empty() ? Environment{} : envs.front(), std::nullopt, std::nullopt});
      for (std::string s = state; reached_by.count(s);) {
        const Configuration& c = reached_by.at(s);
        path.push_back(c);
        s = c.state;
      }
      std::reverse(path.begin(), path.end());
      result.outcome = DeadlockResult::Outcome::Deadlock;
      result.deadlock_free = false;
      result.witness = std::move(path);
      return result;
    }
  }
  result.outcome = DeadlockResult::Outcome::DeadlockFree;
  result.deadlock_free = true;
  return result;
}

}  // namespace caseforge::lre

#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

namespace counterca {

// Reachable-set propagation along a chain of counters.  Counter 0 receives an
// arbitrary increment in {1,2} from time `first_uncertain` on; counter k+1
// receives a known increment until counter k can disagree on whether it emits.
// The last counter is observed.  Every reachable set contains the true state,
// so agreement of the whole set means agreement with the true orbit.
struct ChannelResult {
  // First time the observed part of the last counter may differ; horizon + 1 if never.
  std::int64_t arrival = 0;
  // Arrival times of uncertainty at each counter's input.
  std::vector<std::int64_t> input_arrival;
  std::size_t max_states = 0;
  bool fallback = false;
};

template <class Ops>
ChannelResult run_channel(const Ops& ops, const std::vector<typename Ops::State>& initial,
                          const std::vector<int>& first_inputs, std::int64_t first_uncertain, std::int64_t horizon,
                          std::size_t cap) {
  using State = typename Ops::State;
  ChannelResult res;
  const std::int64_t never = horizon + 1;
  std::vector<int> known = first_inputs;
  std::int64_t u = first_uncertain;
  const std::size_t last = initial.size() - 1;

  for (std::size_t k = 0; k < initial.size(); ++k) {
    res.input_arrival.push_back(u);
    const bool observed = k == last;
    std::vector<State> set{initial[k]};
    std::vector<int> emitted;
    std::int64_t next_u = never;
    if (!ops.supported(k)) {
      if (observed) {
        res.arrival = std::min(never, ops.unsupported_arrival(k, u));
        return res;
      }
      next_u = std::min(never, u);
      res.fallback = true;
      State s = initial[k];
      for (std::int64_t t = 0; t < next_u; ++t) {
        emitted.push_back(ops.emits(k, s) ? 2 : 1);
        if (t < u) s = ops.advance(k, s, known[static_cast<std::size_t>(t)]);
      }
      known = std::move(emitted);
      u = next_u;
      continue;
    }
    for (std::int64_t t = 0;; ++t) {
      if (observed) {
        auto key = ops.observe(k, set.front());
        for (const auto& s : set)
          if (ops.observe(k, s) != key) {
            res.arrival = t;
            return res;
          }
      } else {
        bool any = false, all = true;
        for (const auto& s : set) {
          bool e = ops.emits(k, s);
          any = any || e;
          all = all && e;
        }
        if (any != all) {
          next_u = t;
          break;
        }
        emitted.push_back(any ? 2 : 1);
        if (t >= u && ops.cannot_emit_before(k, set, t, never)) {
          for (std::int64_t s = t + 1; s < never; ++s) emitted.push_back(1);
          break;
        }
      }
      if (t >= horizon) break;
      std::vector<State> next;
      next.reserve(t < u ? set.size() : 2 * set.size());
      if (t < u) {
        for (const auto& s : set) next.push_back(ops.advance(k, s, known[static_cast<std::size_t>(t)]));
      } else {
        for (const auto& s : set) {
          next.push_back(ops.advance(k, s, 1));
          next.push_back(ops.advance(k, s, 2));
        }
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
      }
      set = std::move(next);
      res.max_states = std::max(res.max_states, set.size());
      if (set.size() > cap) {
        res.fallback = true;
        if (observed) {
          res.arrival = t + 1;
          return res;
        }
        std::int64_t e = never;
        for (const auto& s : set) e = std::min(e, ops.earliest_emission(k, s, t + 1));
        next_u = std::min(never, e);
        for (std::int64_t s = t + 1; s < next_u; ++s) emitted.push_back(1);
        break;
      }
    }
    if (observed) {
      res.arrival = never;
      return res;
    }
    known = std::move(emitted);
    u = next_u;
  }
  res.arrival = never;
  return res;
}

}  // namespace counterca

#include "support/brute_force.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "condmon/error.hpp"

namespace oracle {

namespace {

struct Best {
  std::size_t count = 0;
  std::int64_t spread = 0;
  std::vector<std::int64_t> pivots;
  std::vector<std::vector<std::size_t>> tuples;
};

bool better(const Best& a, const Best& b) {
  if (a.count != b.count) return a.count > b.count;
  if (a.spread != b.spread) return a.spread < b.spread;
  return a.pivots < b.pivots;
}

class Search {
 public:
  Search(const Queues& q, std::int64_t slop) : q_(q), slop_(slop) {}

  Best solve(const std::vector<std::size_t>& from) {
    if (auto it = memo_.find(from); it != memo_.end()) return it->second;
    Best best;  // the empty continuation
    std::vector<std::size_t> pick(q_.size());
    enumerate(from, pick, 0, best);
    memo_.emplace(from, best);
    return best;
  }

 private:
  void enumerate(const std::vector<std::size_t>& from, std::vector<std::size_t>& pick, std::size_t s, Best& best) {
    if (s == q_.size()) {
      std::int64_t lo = q_[0][pick[0]], hi = lo;
      for (std::size_t i = 1; i < q_.size(); ++i) {
        lo = std::min(lo, q_[i][pick[i]]);
        hi = std::max(hi, q_[i][pick[i]]);
      }
      if (hi - lo > slop_) return;
      std::vector<std::size_t> next(pick);
      for (auto& n : next) ++n;
      Best rest = solve(next);
      Best cand;
      cand.count = rest.count + 1;
      cand.spread = rest.spread + (hi - lo);
      cand.pivots.push_back(hi);
      cand.pivots.insert(cand.pivots.end(), rest.pivots.begin(), rest.pivots.end());
      cand.tuples.push_back(pick);
      cand.tuples.insert(cand.tuples.end(), rest.tuples.begin(), rest.tuples.end());
      if (better(cand, best)) best = std::move(cand);
      return;
    }
    for (std::size_t j = from[s]; j < q_[s].size(); ++j) {
      pick[s] = j;
      enumerate(from, pick, s + 1, best);
    }
  }

  const Queues& q_;
  std::int64_t slop_;
  std::map<std::vector<std::size_t>, Best> memo_;
};

}  // namespace

Match brute_force_match(const Queues& queues, std::int64_t slop_ns) {
  std::size_t total = 0;
  for (const auto& q : queues) total += q.size();
  if (total > kMaxMessages) {
    throw condmon::Error(condmon::Errc::TooLarge, "brute force limited to 20 messages");
  }
  Match m;
  if (queues.empty()) return m;
  Search search(queues, slop_ns);
  Best b = search.solve(std::vector<std::size_t>(queues.size(), 0));
  m.tuples = std::move(b.tuples);
  m.total_spread = b.spread;
  m.pivots = std::move(b.pivots);
  return m;
}

std::vector<std::int64_t> common_stamps(const Queues& queues) {
  if (queues.empty()) return {};
  std::set<std::int64_t> common(queues[0].begin(), queues[0].end());
  for (std::size_t i = 1; i < queues.size(); ++i) {
    std::set<std::int64_t> next;
    for (auto t : queues[i]) {
      if (common.count(t)) next.insert(t);
    }
    common = std::move(next);
  }
  return {common.begin(), common.end()};
}

}  // namespace oracle

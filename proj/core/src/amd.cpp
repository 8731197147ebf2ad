// Approximate minimum degree ordering.
//
// The elimination is simulated on a quotient graph: every eliminated pivot
// becomes an "element" whose variable list Le stands for the clique it
// created, so storage never exceeds the input pattern. Degrees are the
// approximate external degrees of Amestoy, Davis & Duff (1996):
//
//   d_i = min( d_i_old + |Lme \ i|,  |A_i \ i| + |Lme \ i| + sum_e |Le \ Lme|,  n_left - |i| )
//
// with all sizes weighted by supervariable cardinality.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "seldet/ordering.hpp"

namespace seldet {

namespace {

enum class State : std::uint8_t { Variable, Element, Dead, Merged, Dense };

template <class T>
void release(std::vector<T>& v) {
  std::vector<T>().swap(v);
}

class QuotientGraph {
 public:
  explicit QuotientGraph(const SparseSymmetric& a);

  std::vector<Index> run();

 private:
  std::size_t u(Index i) const { return static_cast<std::size_t>(i); }

  void emit_members(Index i, std::vector<Index>& order) const {
    for (Index m = head_[u(i)]; m != -1; m = next_[u(m)]) order.push_back(m);
  }

  void merge_members(Index into, Index from) {
    next_[u(tail_[u(into)])] = head_[u(from)];
    tail_[u(into)] = tail_[u(from)];
    head_[u(from)] = tail_[u(from)] = -1;
  }

  bool indistinguishable(Index a, Index b) {
    if (elems_[u(a)].size() != elems_[u(b)].size() || vars_[u(a)].size() != vars_[u(b)].size()) {
      return false;
    }
    return elems_[u(a)] == elems_[u(b)] && vars_[u(a)] == vars_[u(b)];
  }

  Index n_;
  std::vector<State> state_;
  std::vector<std::vector<Index>> elems_;  // variable: adjacent elements
  std::vector<std::vector<Index>> vars_;   // variable: adjacent variables; element: Le
  std::vector<Index> nv_;                  // supervariable weight
  std::vector<Index> degree_;
  std::vector<Index> elem_weight_;  // element: sum of nv over Le
  std::vector<Index> head_, tail_, next_;
  std::set<std::pair<Index, Index>> queue_;  // (approximate degree, index)
  Index n_left_ = 0;
};

QuotientGraph::QuotientGraph(const SparseSymmetric& a)
    : n_(a.size()),
      state_(u(n_), State::Variable),
      elems_(u(n_)),
      vars_(u(n_)),
      nv_(u(n_), 1),
      degree_(u(n_), 0),
      elem_weight_(u(n_), 0),
      head_(u(n_)),
      tail_(u(n_)),
      next_(u(n_), -1) {
  std::vector<std::vector<Index>> adj(u(n_));
  for (Index j = 0; j < n_; ++j) {
    for (Index i : a.column_rows(j)) {
      if (i == j) continue;
      adj[u(i)].push_back(j);
      adj[u(j)].push_back(i);
    }
  }
  const double dense = 10.0 * std::sqrt(static_cast<double>(n_));
  for (Index i = 0; i < n_; ++i) {
    head_[u(i)] = tail_[u(i)] = i;
    if (static_cast<double>(adj[u(i)].size()) > dense) state_[u(i)] = State::Dense;
  }
  for (Index i = 0; i < n_; ++i) {
    if (state_[u(i)] == State::Dense) continue;
    auto& v = vars_[u(i)];
    for (Index j : adj[u(i)]) {
      if (state_[u(j)] != State::Dense) v.push_back(j);
    }
    release(adj[u(i)]);
    degree_[u(i)] = static_cast<Index>(v.size());
    queue_.emplace(degree_[u(i)], i);
    ++n_left_;
  }
}

std::vector<Index> QuotientGraph::run() {
  std::vector<Index> order;
  order.reserve(u(n_));

  std::vector<Index> in_lme(u(n_), -1);
  std::vector<Index> w_mark(u(n_), -1);
  std::vector<Index> w_val(u(n_), 0);
  std::vector<Index> ext_deg(u(n_), 0);
  std::vector<Index> lme;
  std::vector<Index> survivors;
  std::vector<std::pair<std::uint64_t, Index>> hashed;

  Index step = 0;
  while (!queue_.empty()) {
    const Index me = queue_.begin()->second;
    queue_.erase(queue_.begin());
    ++step;

    Index nvpiv = nv_[u(me)];
    n_left_ -= nvpiv;
    emit_members(me, order);

    // New element: union of the pivot's elements (absorbed) and variables.
    lme.clear();
    in_lme[u(me)] = step;
    auto take = [&](Index j) {
      if (state_[u(j)] == State::Variable && in_lme[u(j)] != step) {
        in_lme[u(j)] = step;
        lme.push_back(j);
      }
    };
    for (Index e : elems_[u(me)]) {
      if (state_[u(e)] != State::Element) continue;
      for (Index j : vars_[u(e)]) take(j);
      state_[u(e)] = State::Dead;
      release(vars_[u(e)]);
    }
    for (Index j : vars_[u(me)]) take(j);
    state_[u(me)] = State::Element;
    release(elems_[u(me)]);
    release(vars_[u(me)]);

    for (Index i : lme) queue_.erase({degree_[u(i)], i});

    // w(e) = |Le \ Lme| for every element touching Lme.
    for (Index i : lme) {
      for (Index e : elems_[u(i)]) {
        if (state_[u(e)] != State::Element) continue;
        if (w_mark[u(e)] != step) {
          w_mark[u(e)] = step;
          w_val[u(e)] = elem_weight_[u(e)];
        }
        w_val[u(e)] -= nv_[u(i)];
      }
    }

    // Prune lists, absorb covered elements, accumulate external degree.
    survivors.clear();
    hashed.clear();
    for (Index i : lme) {
      Index ext = 0;
      std::uint64_t hash = 0;
      auto& el = elems_[u(i)];
      std::size_t keep = 0;
      for (Index e : el) {
        if (state_[u(e)] != State::Element) continue;
        if (w_val[u(e)] == 0) {
          state_[u(e)] = State::Dead;  // aggressive absorption: Le is inside Lme
          release(vars_[u(e)]);
          continue;
        }
        ext += w_val[u(e)];
        hash += static_cast<std::uint64_t>(e);
        el[keep++] = e;
      }
      el.resize(keep);
      el.push_back(me);
      hash += static_cast<std::uint64_t>(me);

      auto& vl = vars_[u(i)];
      keep = 0;
      for (Index j : vl) {
        if (state_[u(j)] != State::Variable || in_lme[u(j)] == step) continue;
        ext += nv_[u(j)];
        hash += static_cast<std::uint64_t>(j);
        vl[keep++] = j;
      }
      vl.resize(keep);

      if (el.size() == 1 && vl.empty()) {
        // Only adjacent to the new element: eliminate together with the pivot.
        state_[u(i)] = State::Merged;
        emit_members(i, order);
        nvpiv += nv_[u(i)];
        n_left_ -= nv_[u(i)];
        release(el);
        continue;
      }
      ext_deg[u(i)] = ext;
      hashed.emplace_back(hash, i);
      survivors.push_back(i);
    }

    // Supervariable detection among variables with equal hash.
    std::sort(hashed.begin(), hashed.end());
    for (std::size_t g = 0; g < hashed.size();) {
      std::size_t end = g + 1;
      while (end < hashed.size() && hashed[end].first == hashed[g].first) ++end;
      if (end - g > 1) {
        for (std::size_t q = g; q < end; ++q) {
          const Index i = hashed[q].second;
          std::sort(elems_[u(i)].begin(), elems_[u(i)].end());
          std::sort(vars_[u(i)].begin(), vars_[u(i)].end());
        }
        for (std::size_t q = g; q < end; ++q) {
          const Index keep_i = hashed[q].second;
          if (state_[u(keep_i)] != State::Variable) continue;
          for (std::size_t r = q + 1; r < end; ++r) {
            const Index drop = hashed[r].second;
            if (state_[u(drop)] != State::Variable || !indistinguishable(keep_i, drop)) continue;
            nv_[u(keep_i)] += nv_[u(drop)];
            nv_[u(drop)] = 0;
            state_[u(drop)] = State::Merged;
            merge_members(keep_i, drop);
            release(elems_[u(drop)]);
            release(vars_[u(drop)]);
          }
        }
      }
      g = end;
    }

    Index degme = 0;
    auto& le = vars_[u(me)];
    for (Index i : survivors) {
      if (state_[u(i)] != State::Variable) continue;
      degme += nv_[u(i)];
      le.push_back(i);
    }
    elem_weight_[u(me)] = degme;
    nv_[u(me)] = nvpiv;

    for (Index i : le) {
      const Index outside = degme - nv_[u(i)];
      const Index bound = std::min({degree_[u(i)] + outside, ext_deg[u(i)] + outside, n_left_ - nv_[u(i)]});
      degree_[u(i)] = std::max<Index>(bound, 0);
      queue_.emplace(degree_[u(i)], i);
    }
    if (le.empty()) release(le);
  }

  for (Index i = 0; i < n_; ++i) {
    if (state_[u(i)] == State::Dense) order.push_back(i);
  }
  return order;
}

}  // namespace

Permutation amd_order(const SparseSymmetric& a) {
  QuotientGraph graph(a);
  return Permutation(graph.run());
}

}  // namespace seldet
